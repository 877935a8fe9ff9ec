// Message types for the /session WebSocket. Mirrors the server's published
// JSON schemas (schemas/wire_command.schema.json, wire_snapshot.schema.json).

export interface SnapshotRobot {
  world_x_m: number;
  y_m: number;
  xdot_mps: number;
  ydot_mps: number;
  stance_foot_world_x_m: number;
  phase: string;
  phase_time_s: number;
  stance_side: string;
}

export interface SnapshotReference {
  x_m: number;
  xdot_mps: number;
  xi_m: number;
  xi_norm: number;
  elongated: boolean;
}

export interface SnapshotPilot {
  com_x_m: number;
  com_y_m: number;
  contact_left: boolean;
  contact_right: boolean;
}

export interface SnapshotForces {
  f_hmi_n: number;
  f_s_n: number;
  f_ext_n: number;
  f_ff_n: number;
  f_fb_n: number;
}

export interface SnapshotStep {
  t: number;
  kind: string;
  length_m: number;
  stance: string;
}

export interface Snapshot {
  type: "snapshot";
  session_state: string;
  tick: number;
  time_s: number;
  realtime_factor: number | null;
  robot: SnapshotRobot;
  reference: SnapshotReference;
  pilot: SnapshotPilot;
  forces: SnapshotForces;
  xi_r_norm: number;
  last_step: SnapshotStep | null;
  fall: boolean;
  diverged: boolean;
}

export interface AckReply {
  type: "ack";
  applied_tick: number | null;
  detail: string;
}

export interface ErrorReply {
  type: "error";
  reason: string;
}

export type ServerMessage = Snapshot | AckReply | ErrorReply;

export interface PilotCommand {
  type: "pilot";
  lean?: number;
  tempo?: number;
  stop?: boolean;
}

export interface DisturbCommand {
  type: "disturb";
  force_n: number;
  duration_s: number;
}

export interface SessionCommand {
  type: "session";
  action: "start" | "pause" | "reset";
}

export type Command = PilotCommand | DisturbCommand | SessionCommand;

function isNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

/** Parse and structurally validate a server frame; null if unusable. */
export function decodeServerMessage(text: string): ServerMessage | null {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null) return null;
  const msg = raw as Record<string, unknown>;
  switch (msg.type) {
    case "ack":
      return {
        type: "ack",
        applied_tick: isNumber(msg.applied_tick) ? msg.applied_tick : null,
        detail: typeof msg.detail === "string" ? msg.detail : "",
      };
    case "error":
      return typeof msg.reason === "string"
        ? { type: "error", reason: msg.reason }
        : null;
    case "snapshot": {
      if (
        typeof msg.session_state !== "string" ||
        !isNumber(msg.tick) ||
        !isNumber(msg.time_s) ||
        typeof msg.robot !== "object" ||
        typeof msg.reference !== "object" ||
        typeof msg.forces !== "object"
      ) {
        return null;
      }
      return msg as unknown as Snapshot;
    }
    default:
      return null;
  }
}

export function encodeCommand(cmd: Command): string {
  return JSON.stringify(cmd);
}
