export { CoreProcessError, type CoreOptions } from "./cli.js";
export { DeformMap, TmapFormatError, parseTmap } from "./tmap.js";
export {
  IDENTITY_POSE,
  Session,
  SessionError,
  openSession,
  type Pose,
  type PoseUpdate,
  type SignalRecord,
} from "./session.js";
