/** View model: everything rendered is an accumulation of streamed events.
 *
 * No simulation logic lives client-side; totals shown are sums of streamed
 * fields, and replaying the same events reproduces the identical state.
 */

import type { FrameEvent, InterventionEvent, RunInfo, SiteInfo, StreamEvent } from "./api.js";

export interface SiteGauge {
  site: SiteInfo;
  landedToday: number;
  capacity: number;
  saturated: boolean;
  fuCounts: [number, number, number];
}

export interface Marker { date: string; label: string }

export class ViewModel {
  dates: string[] = [];
  /** cumulative landed tons per country, one series point per frame */
  countrySeries = new Map<string, number[]>();
  /** biomass tons per species, one point per frame */
  biomassSeries = new Map<string, number[]>();
  shortMigrations: number[] = [];
  longMigrations: number[] = [];
  gauges: SiteGauge[] = [];
  markers: Marker[] = [];
  status = "created";
  endError: string | null = null;
  private capacityOverrides = new Map<string, number>();

  constructor(public run: RunInfo) {
    this.status = run.status;
    this.gauges = run.sites.map((site) => ({
      site, landedToday: 0, capacity: site.capacity, saturated: site.capacity <= 0,
      fuCounts: [0, 0, 0],
    }));
  }

  get frameCount(): number {
    return this.dates.length;
  }

  apply(event: StreamEvent): void {
    if (event.type === "frame") this.applyFrame(event);
    else if (event.type === "intervention") this.applyIntervention(event);
    else {
      this.status = event.status;
      this.endError = event.error;
    }
  }

  private applyFrame(frame: FrameEvent): void {
    this.dates.push(frame.date);
    const n = this.dates.length;
    for (const [country, total] of Object.entries(frame.country_catch)) {
      let series = this.countrySeries.get(country);
      if (!series) {
        series = new Array(n - 1).fill(0);
        this.countrySeries.set(country, series);
      }
      series.push(total);
    }
    for (const row of frame.biomass) {
      let series = this.biomassSeries.get(row.species);
      if (!series) {
        series = new Array(n - 1).fill(0);
        this.biomassSeries.set(row.species, series);
      }
      series.push(row.tons);
    }
    this.shortMigrations.push(frame.short_migrations);
    this.longMigrations.push(frame.long_migrations);

    const landed = new Map(frame.landings.map((row) => [row.site, row.tons]));
    const counts = new Map<string, [number, number, number]>();
    for (const row of frame.fleet) {
      const entry = counts.get(row.site) ?? [0, 0, 0];
      entry[row.cat - 1] = row.count;
      counts.set(row.site, entry);
    }
    for (const gauge of this.gauges) {
      gauge.capacity = this.capacityOverrides.get(gauge.site.name) ?? gauge.site.capacity;
      gauge.landedToday = landed.get(gauge.site.name) ?? 0;
      gauge.saturated = gauge.landedToday >= gauge.capacity;
      gauge.fuCounts = counts.get(gauge.site.name) ?? [0, 0, 0];
    }
  }

  private applyIntervention(event: InterventionEvent): void {
    const cmd = event.command;
    this.markers.push({
      date: event.effective_date,
      label: describeCommand(cmd),
    });
    if (cmd.kind === "set_site_capacity") {
      this.capacityOverrides.set(String(cmd.site), Number(cmd.capacity));
    }
  }

  /** Sum of the latest cumulative per-country totals (for the header). */
  totalCatch(): number {
    let total = 0;
    for (const series of this.countrySeries.values()) {
      if (series.length) total += series[series.length - 1];
    }
    return total;
  }

  totalBiomass(): number {
    let total = 0;
    for (const series of this.biomassSeries.values()) {
      if (series.length) total += series[series.length - 1];
    }
    return total;
  }
}

export function describeCommand(cmd: Record<string, unknown>): string {
  switch (cmd.kind) {
    case "set_site_capacity":
      return `capacity(${cmd.site}) = ${cmd.capacity} t/day`;
    case "scale_catchability":
      return cmd.category
        ? `q(cat ${cmd.category}) x ${cmd.factor}`
        : `q(all) x ${cmd.factor}`;
    case "set_campaign_prob":
      return `campaign p(cat ${cmd.category}) = ${cmd.p}`;
    case "add_units":
      return `+${cmd.n} cat-${cmd.category} units at ${cmd.site}`;
    case "remove_units":
      return `-${cmd.n} cat-${cmd.category} units at ${cmd.site}`;
    default:
      return JSON.stringify(cmd);
  }
}
