import { boot } from "./controller.js";

const params = new URLSearchParams(window.location.search);
const wsUrl = params.get("ws") ?? "ws://127.0.0.1:8765";

boot(document, wsUrl);
