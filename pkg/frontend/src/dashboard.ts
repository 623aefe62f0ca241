/** Dashboard model: fold agent observations and station stats into per-
 * artifact tiles. Pure functions so the rendering layer stays trivial and
 * the semantics are unit-testable without a DOM.
 */

import type { Observation, StatsDoc } from "./api.js";

export const UNAVAILABLE = "UNAVAILABLE";

export interface Tile {
  artifactId: string;
  /** Exactly what the agent reported, e.g. "30 psi" or "green". */
  text: string;
  timestamp: string;
  stale: boolean;
  confidence: number | null;
}

export type LampState = "red" | "yellow" | "green" | "off" | "unknown";

/** Units come from the station config; the agent stream carries bare values. */
export function buildTiles(
  observations: Observation[],
  unitsById: Record<string, string | null | undefined> = {},
  stats: StatsDoc | null = null,
): Tile[] {
  return observations.map((obs) => {
    const stale = obs.value === UNAVAILABLE;
    const units = unitsById[obs.dataItemId];
    const reading = stats?.last_readings?.[obs.dataItemId];
    return {
      artifactId: obs.dataItemId,
      text: stale || !units ? obs.value : `${obs.value} ${units}`,
      timestamp: obs.timestamp,
      stale,
      confidence: reading ? reading.confidence : null,
    };
  });
}

/** The status lamp mirrors the panel's safety light reading. */
export function lampState(observations: Observation[], lightId: string): LampState {
  const obs = observations.find((o) => o.dataItemId === lightId);
  if (!obs || obs.value === UNAVAILABLE) return "unknown";
  if (obs.value === "red" || obs.value === "yellow" || obs.value === "green" || obs.value === "off") {
    return obs.value;
  }
  return "unknown";
}
