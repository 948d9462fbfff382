export {
  ADAPTER_NAME,
  ADAPTER_VERSION,
  ExtractError,
  extractAll,
} from "./extract.js";
export type {
  AdapterManifest,
  ExtractOptions,
  StageFailure,
} from "./extract.js";
export {
  TEXT_FEATURE_DIM,
  stubBackbones,
  stubShotDetector,
  stubVisualEncoder,
  stubCaptioner,
  stubTextEncoder,
  stubTranscriber,
  stubLaughterModel,
  stubAudioTagger,
} from "./backbones.js";
export type { Backbones } from "./backbones.js";
export {
  DEFAULT_FRAMES_PER_SHOT,
  frameTimes,
  poolFrameFeatures,
} from "./frame-sampling.js";
export { MediaError, probeMedia, titleIdForMedia } from "./media.js";
export { SCORER_MODEL_ID, TranscriptHumorScorer } from "./scorer.js";
export { handleRequestLine, serveStdio } from "./scorer-main.js";
