/** Intervention form validation: block malformed commands client-side. */

export interface FormResult {
  ok: boolean;
  command?: Record<string, unknown>;
  error?: string;
}

export function buildSetCapacity(site: string, siteNames: string[],
                                 capacityText: string): FormResult {
  if (!siteNames.includes(site)) {
    return { ok: false, error: `unknown site: ${site}` };
  }
  const capacity = Number(capacityText);
  if (capacityText.trim() === "" || !Number.isFinite(capacity) || capacity < 0) {
    return { ok: false, error: "capacity must be a number >= 0" };
  }
  return { ok: true, command: { kind: "set_site_capacity", site, capacity } };
}

export function buildScaleCatchability(factorText: string,
                                       categoryText: string): FormResult {
  const factor = Number(factorText);
  if (factorText.trim() === "" || !Number.isFinite(factor) || factor <= 0) {
    return { ok: false, error: "factor must be a number > 0" };
  }
  const command: Record<string, unknown> = { kind: "scale_catchability", factor };
  if (categoryText !== "all") {
    const category = Number(categoryText);
    if (![1, 2, 3].includes(category)) {
      return { ok: false, error: "category must be 1, 2, 3 or all" };
    }
    command.category = category;
  }
  return { ok: true, command };
}

export function buildSetCampaignProb(categoryText: string, pText: string): FormResult {
  const category = Number(categoryText);
  if (![1, 2, 3].includes(category)) {
    return { ok: false, error: "category must be 1, 2 or 3" };
  }
  const p = Number(pText);
  if (pText.trim() === "" || !Number.isFinite(p) || p < 0 || p > 1) {
    return { ok: false, error: "probability must be in [0, 1]" };
  }
  return { ok: true, command: { kind: "set_campaign_prob", category, p } };
}

export function buildChangeUnits(kind: "add_units" | "remove_units", site: string,
                                 siteNames: string[], categoryText: string,
                                 nText: string): FormResult {
  if (!siteNames.includes(site)) {
    return { ok: false, error: `unknown site: ${site}` };
  }
  const category = Number(categoryText);
  if (![1, 2, 3].includes(category)) {
    return { ok: false, error: "category must be 1, 2 or 3" };
  }
  if (kind === "remove_units" && nText === "all") {
    return { ok: true, command: { kind, site, category, n: "all" } };
  }
  const n = Number(nText);
  if (!Number.isInteger(n) || n <= 0) {
    return { ok: false, error: "unit count must be a positive integer" };
  }
  return { ok: true, command: { kind, site, category, n } };
}
