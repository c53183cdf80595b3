/** Schematic coast map: landing sites as gauged markers, no GIS stack. */

import type { SiteGauge } from "./model.js";

export interface MapLayout {
  toXY(lat: number, lon: number): [number, number];
}

export function buildLayout(gauges: SiteGauge[], width: number,
                            height: number, pad = 30): MapLayout {
  const lats = gauges.map((g) => g.site.lat);
  const lons = gauges.map((g) => g.site.lon);
  const latMin = Math.min(...lats) - 0.5;
  const latMax = Math.max(...lats) + 0.5;
  const lonMin = Math.min(...lons) - 0.8;
  const lonMax = Math.max(...lons) + 0.8;
  return {
    toXY(lat: number, lon: number): [number, number] {
      const x = pad + ((lon - lonMin) / (lonMax - lonMin)) * (width - 2 * pad);
      const y = pad + ((latMax - lat) / (latMax - latMin)) * (height - 2 * pad);
      return [x, y];
    },
  };
}

export function drawMap(canvas: HTMLCanvasElement, gauges: SiteGauge[]): void {
  const ctx = canvas.getContext("2d");
  if (!ctx || gauges.length === 0) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  const layout = buildLayout(gauges, width, height);

  // schematic coastline: polyline through the sites, sea to the west
  const ordered = [...gauges].sort((a, b) => b.site.lat - a.site.lat);
  ctx.strokeStyle = "#a0aec0";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ordered.forEach((g, i) => {
    const [x, y] = layout.toXY(g.site.lat, g.site.lon);
    if (i === 0) ctx.moveTo(x + 14, y - 20);
    ctx.lineTo(x + 14, y);
  });
  const last = ordered[ordered.length - 1];
  const [lx, ly] = layout.toXY(last.site.lat, last.site.lon);
  ctx.lineTo(lx + 14, ly + 20);
  ctx.stroke();

  ctx.font = "10px sans-serif";
  for (const gauge of gauges) {
    const [x, y] = layout.toXY(gauge.site.lat, gauge.site.lon);
    const total = gauge.fuCounts[0] + gauge.fuCounts[1] + gauge.fuCounts[2];
    const radius = 4 + Math.sqrt(total) * 1.6;
    ctx.beginPath();
    ctx.arc(x, y, radius, 0, 2 * Math.PI);
    ctx.fillStyle = gauge.saturated ? "rgba(229,62,62,0.75)" : "rgba(49,130,206,0.65)";
    ctx.fill();
    ctx.strokeStyle = "#2d3748";
    ctx.lineWidth = 1;
    ctx.stroke();
    ctx.fillStyle = "#1a202c";
    ctx.fillText(`${gauge.site.name} (${total})`, x + radius + 3, y + 3);
    // capacity gauge bar under the marker
    const ratio = gauge.capacity > 0 ? Math.min(1, gauge.landedToday / gauge.capacity) : 1;
    ctx.fillStyle = "#e2e8f0";
    ctx.fillRect(x - 15, y + radius + 3, 30, 4);
    ctx.fillStyle = gauge.saturated ? "#e53e3e" : "#38a169";
    ctx.fillRect(x - 15, y + radius + 3, 30 * ratio, 4);
  }
}
