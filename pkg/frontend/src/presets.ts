// Gesture palette presets: feature vectors matching demo/model.json
// (also shipped as demo/gesture_presets.json). "wave" sits far from
// every trained centroid, so it lands in the background class.

export const GESTURE_PRESETS: Record<string, number[]> = {
  fist: [0.1, 0.9],
  open: [0.9, 0.1],
  point: [0.5, 0.5],
  wave: [0.95, 0.95],
};
