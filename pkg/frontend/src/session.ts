/**
 * Sessions: N independent environments over one scene config. Poses are
 * staged in memory; `render()` hands the whole batch to the core in a single
 * replay invocation (one trajectory frame per environment) and parses the
 * TMAP files and signal records it writes back.
 */

import { mkdtempSync, readFileSync, readdirSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";

import { CoreOptions, resolvePython, runCore } from "./cli.js";
import { DeformMap, parseTmap } from "./tmap.js";

export class SessionError extends Error {}

/** A rigid pose: unit quaternion (w, x, y, z) and translation in meters. */
export interface Pose {
  q: [number, number, number, number];
  t: [number, number, number];
}

export const IDENTITY_POSE: Pose = { q: [1, 0, 0, 0], t: [0, 0, 0] };

/** Contact summary for one environment, as reported by the core. */
export interface SignalRecord {
  in_contact: boolean;
  centroid_pixel: [number, number] | null;
  centroid_point_m: [number, number, number] | null;
  contact_area_m2: number;
  max_depth_m: number;
  mean_depth_m: number;
  net_force_N: [number, number, number];
}

export interface PoseUpdate {
  sensorPose?: Pose;
  objectPoses?: Record<string, Pose>;
}

interface EnvState {
  sensorPose: Pose;
  objectPoses: Map<string, Pose>;
}

interface StepResult {
  maps: DeformMap[];
  signals: SignalRecord[];
}

function clonePose(pose: Pose, context: string): Pose {
  if (!Array.isArray(pose.q) || pose.q.length !== 4 || !pose.q.every(Number.isFinite)) {
    throw new SessionError(`${context}: pose.q must be 4 finite numbers (w, x, y, z)`);
  }
  if (!Array.isArray(pose.t) || pose.t.length !== 3 || !pose.t.every(Number.isFinite)) {
    throw new SessionError(`${context}: pose.t must be 3 finite numbers in meters`);
  }
  return { q: [...pose.q], t: [...pose.t] };
}

export class Session {
  private envs: EnvState[];
  private closed = false;
  private cached: StepResult | null = null;
  private readonly python: string;

  private constructor(
    readonly scenePath: string,
    readonly numEnvs: number,
    /** sensing-grid descriptor reported by the core (variant, H, W, ...) */
    readonly gridDescriptor: Record<string, unknown>,
    /** object names declared by the scene config */
    readonly objectNames: readonly string[],
    python: string,
  ) {
    this.python = python;
    this.envs = Array.from({ length: numEnvs }, () => ({
      sensorPose: clonePose(IDENTITY_POSE, "identity"),
      objectPoses: new Map<string, Pose>(),
    }));
  }

  static open(scenePath: string, numEnvs: number, opts?: CoreOptions): Session {
    if (!Number.isInteger(numEnvs) || numEnvs < 1) {
      throw new SessionError(`numEnvs must be a positive integer, got ${numEnvs}`);
    }
    const absolute = resolve(scenePath);
    const python = resolvePython(opts);

    // the core validates the config and reports the grid; its diagnostics
    // propagate via CoreProcessError on failure
    const workDir = mkdtempSync(join(tmpdir(), "tacmap-open-"));
    let descriptor: Record<string, unknown>;
    try {
      const reply = runCore(python, ["grid", "--scene", absolute, "--out", join(workDir, "grid")]);
      descriptor = reply["descriptor"] as Record<string, unknown>;
    } finally {
      rmSync(workDir, { recursive: true, force: true });
    }

    // object names come straight from the documented scene-config schema
    const config = JSON.parse(readFileSync(absolute, "utf8")) as {
      objects?: { name?: string }[];
    };
    const names = (config.objects ?? []).map((o) => o.name ?? "");

    return new Session(absolute, numEnvs, descriptor, names, python);
  }

  get isClosed(): boolean {
    return this.closed;
  }

  private assertOpen(): void {
    if (this.closed) {
      throw new SessionError("session is closed");
    }
  }

  /** Stage poses for one environment, or for every environment with "all". */
  setPoses(envIndex: number | "all", update: PoseUpdate): void {
    this.assertOpen();
    const targets =
      envIndex === "all" ? this.envs : [this.env(envIndex)];
    for (const [name] of Object.entries(update.objectPoses ?? {})) {
      if (!this.objectNames.includes(name)) {
        throw new SessionError(
          `unknown object ${JSON.stringify(name)}; scene declares: ${this.objectNames.join(", ")}`,
        );
      }
    }
    for (const env of targets) {
      if (update.sensorPose) {
        env.sensorPose = clonePose(update.sensorPose, "sensorPose");
      }
      for (const [name, pose] of Object.entries(update.objectPoses ?? {})) {
        env.objectPoses.set(name, clonePose(pose, `objectPoses[${name}]`));
      }
    }
    this.cached = null;
  }

  /** Reset one environment (or all) back to identity poses. */
  resetPoses(envIndex: number | "all" = "all"): void {
    this.assertOpen();
    const targets = envIndex === "all" ? this.envs : [this.env(envIndex)];
    for (const env of targets) {
      env.sensorPose = clonePose(IDENTITY_POSE, "identity");
      env.objectPoses.clear();
    }
    this.cached = null;
  }

  /** Render every environment; returns one H*W deformation map per env. */
  render(): DeformMap[] {
    this.assertOpen();
    return this.step().maps.slice();
  }

  /** Contact signals for every environment at its current poses. */
  signals(): SignalRecord[] {
    this.assertOpen();
    return this.step().signals.slice();
  }

  close(): void {
    this.closed = true;
    this.cached = null;
  }

  private env(index: number): EnvState {
    if (!Number.isInteger(index) || index < 0 || index >= this.envs.length) {
      throw new SessionError(`env index ${index} outside 0..${this.envs.length - 1}`);
    }
    return this.envs[index]!;
  }

  /**
   * One core invocation renders the whole batch: environment i becomes
   * trajectory frame i (ts = i). Results are cached until poses change.
   */
  private step(): StepResult {
    if (this.cached) {
      return this.cached;
    }
    const lines = this.envs.map((env, i) => {
      const objects: Record<string, Pose> = {};
      for (const [name, pose] of env.objectPoses) {
        objects[name] = pose;
      }
      return JSON.stringify({ ts: i, sensor_pose: env.sensorPose, objects });
    });

    const workDir = mkdtempSync(join(tmpdir(), "tacmap-step-"));
    try {
      const trajectoryPath = join(workDir, "frames.jsonl");
      writeFileSync(trajectoryPath, lines.join("\n") + "\n");
      const outDir = join(workDir, "out");
      runCore(this.python, [
        "replay",
        "--scene",
        this.scenePath,
        "--trajectory",
        trajectoryPath,
        "--out",
        outDir,
      ]);

      const frameFiles = readdirSync(outDir)
        .filter((name) => name.endsWith(".tmap"))
        .sort();
      if (frameFiles.length !== this.numEnvs) {
        throw new SessionError(`core wrote ${frameFiles.length} frames for ${this.numEnvs} environments`);
      }
      const maps = frameFiles.map((name) => parseTmap(readFileSync(join(outDir, name)), name));
      const signals = readFileSync(join(outDir, "signals.jsonl"), "utf8")
        .split("\n")
        .filter((line) => line.trim().length > 0)
        .map((line) => JSON.parse(line) as SignalRecord & { frame: number });

      this.cached = { maps, signals };
      return this.cached;
    } finally {
      rmSync(workDir, { recursive: true, force: true });
    }
  }
}

/** Open a scene with `numEnvs` independent environments at identity poses. */
export function openSession(scenePath: string, numEnvs: number, opts?: CoreOptions): Session {
  return Session.open(scenePath, numEnvs, opts);
}
