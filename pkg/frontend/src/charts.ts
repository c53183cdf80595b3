/** Minimal dependency-free canvas line charts with intervention markers. */

import type { Marker } from "./model.js";

export interface Series { label: string; values: number[]; color: string }

export const PALETTE = [
  "#2b6cb0", "#c05621", "#2f855a", "#b83280", "#6b46c1",
  "#975a16", "#319795", "#702459", "#4a5568", "#744210",
];

export function colorFor(index: number): string {
  return PALETTE[index % PALETTE.length];
}

export interface ChartData {
  dates: string[];
  series: Series[];
  markers?: { x: number; label: string }[];
}

export function markerPositions(markers: Marker[], dates: string[]):
    { x: number; label: string }[] {
  const index = new Map(dates.map((d, i) => [d, i]));
  const out: { x: number; label: string }[] = [];
  for (const marker of markers) {
    let x = index.get(marker.date);
    if (x === undefined) {
      // effective date beyond current frames: pin to the chart edge
      x = marker.date > (dates[dates.length - 1] ?? "") ? dates.length - 1 : 0;
    }
    out.push({ x, label: marker.label });
  }
  return out;
}

function niceTicks(maxValue: number): number[] {
  if (maxValue <= 0) return [0];
  const raw = maxValue / 4;
  const magnitude = 10 ** Math.floor(Math.log10(raw));
  const step = [1, 2, 5, 10].map((k) => k * magnitude).find((s) => s >= raw) ?? raw;
  const ticks = [];
  for (let v = 0; v <= maxValue * 1.0001; v += step) ticks.push(v);
  return ticks;
}

export function formatTons(value: number): string {
  if (value >= 1e6) return `${(value / 1e6).toFixed(1)}M`;
  if (value >= 1e3) return `${(value / 1e3).toFixed(0)}k`;
  return value.toFixed(0);
}

export function drawLineChart(canvas: HTMLCanvasElement, data: ChartData,
                              title: string): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  const pad = { left: 46, right: 8, top: 20, bottom: 22 };
  const plotW = width - pad.left - pad.right;
  const plotH = height - pad.top - pad.bottom;
  ctx.clearRect(0, 0, width, height);
  ctx.font = "11px sans-serif";
  ctx.fillStyle = "#1a202c";
  ctx.fillText(title, pad.left, 13);

  const n = data.dates.length;
  const maxY = Math.max(1e-9, ...data.series.flatMap((s) => s.values));
  const xOf = (i: number) => pad.left + (n <= 1 ? plotW / 2 : (i / (n - 1)) * plotW);
  const yOf = (v: number) => pad.top + plotH - (v / maxY) * plotH;

  ctx.strokeStyle = "#cbd5e0";
  ctx.fillStyle = "#718096";
  for (const tick of niceTicks(maxY)) {
    const y = yOf(tick);
    ctx.beginPath();
    ctx.moveTo(pad.left, y);
    ctx.lineTo(width - pad.right, y);
    ctx.stroke();
    ctx.fillText(formatTons(tick), 4, y + 3);
  }
  if (n > 0) {
    ctx.fillText(data.dates[0], pad.left, height - 6);
    const last = data.dates[n - 1];
    ctx.fillText(last, width - pad.right - ctx.measureText(last).width, height - 6);
  }

  for (const mark of data.markers ?? []) {
    const x = xOf(mark.x);
    ctx.strokeStyle = "#e53e3e";
    ctx.setLineDash([4, 3]);
    ctx.beginPath();
    ctx.moveTo(x, pad.top);
    ctx.lineTo(x, pad.top + plotH);
    ctx.stroke();
    ctx.setLineDash([]);
  }

  data.series.forEach((series) => {
    ctx.strokeStyle = series.color;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    if (series.values.length === 1) {
      const y = yOf(series.values[0]);
      ctx.moveTo(xOf(0) - 2, y);
      ctx.lineTo(xOf(0) + 2, y);
    } else {
      series.values.forEach((v, i) => {
        if (i === 0) ctx.moveTo(xOf(i), yOf(v));
        else ctx.lineTo(xOf(i), yOf(v));
      });
    }
    ctx.stroke();
  });

  // legend, top-right
  let lx = width - pad.right - 10;
  for (let i = data.series.length - 1; i >= 0; i--) {
    const s = data.series[i];
    const w = ctx.measureText(s.label).width;
    lx -= w + 18;
    ctx.fillStyle = s.color;
    ctx.fillRect(lx, 6, 10, 10);
    ctx.fillStyle = "#1a202c";
    ctx.fillText(s.label, lx + 13, 14);
  }
}
