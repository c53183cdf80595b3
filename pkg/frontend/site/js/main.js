/** Dashboard wiring: run picker, control bar, live charts, intervention forms. */
import { ApiClient, openStream } from "./api.js";
import { colorFor, drawLineChart, markerPositions } from "./charts.js";
import { buildChangeUnits, buildScaleCatchability, buildSetCampaignProb, buildSetCapacity } from "./forms.js";
import { drawMap } from "./map.js";
import { ViewModel } from "./model.js";
const api = new ApiClient("");
let model = null;
let stream = null;
let currentRun = null;
const $ = (id) => document.getElementById(id);
function canvas(id) {
    return $(id);
}
function setStatusLine() {
    if (!model || !currentRun)
        return;
    const date = model.dates[model.dates.length - 1] ?? currentRun.date;
    $("status-line").textContent =
        `${currentRun.run_id} | ${model.status} | day ${model.frameCount} (${date}) | ` +
            `catch ${(model.totalCatch() / 1000).toFixed(1)} kt | ` +
            `biomass ${(model.totalBiomass() / 1000).toFixed(0)} kt` +
            (model.endError ? ` | error: ${model.endError}` : "");
}
function render() {
    if (!model)
        return;
    const dates = model.dates;
    const markers = markerPositions(model.markers, dates);
    const countries = [...model.countrySeries.entries()];
    drawLineChart(canvas("chart-catch"), {
        dates,
        series: countries.map(([label, values], i) => ({ label, values, color: colorFor(i) })),
        markers,
    }, "cumulative catch per country (t)");
    const species = [...model.biomassSeries.entries()];
    drawLineChart(canvas("chart-biomass"), {
        dates,
        series: species.map(([label, values], i) => ({ label, values, color: colorFor(i) })),
        markers,
    }, "biomass per model-species (t)");
    drawLineChart(canvas("chart-migrations"), {
        dates,
        series: [
            { label: "short", values: model.shortMigrations, color: colorFor(0) },
            { label: "long", values: model.longMigrations, color: colorFor(1) },
        ],
        markers,
    }, "cumulative migrations");
    drawMap(canvas("map"), model.gauges);
    setStatusLine();
    renderMarkerLog();
}
function renderMarkerLog() {
    if (!model)
        return;
    const list = $("intervention-log");
    list.innerHTML = "";
    for (const marker of model.markers) {
        const item = document.createElement("li");
        item.textContent = `${marker.date}: ${marker.label}`;
        list.appendChild(item);
    }
}
let renderQueued = false;
function queueRender() {
    if (renderQueued)
        return;
    renderQueued = true;
    requestAnimationFrame(() => {
        renderQueued = false;
        render();
    });
}
function onEvent(event) {
    model?.apply(event);
    queueRender();
}
async function attach(runId) {
    stream?.close();
    currentRun = await api.getRun(runId);
    model = new ViewModel(currentRun);
    populateSiteSelects(currentRun);
    stream = openStream("", runId, onEvent);
    render();
}
function populateSiteSelects(run) {
    for (const id of ["form-capacity-site", "form-units-site"]) {
        const select = $(id);
        select.innerHTML = "";
        for (const site of run.sites) {
            const option = document.createElement("option");
            option.value = site.name;
            option.textContent = site.name;
            select.appendChild(option);
        }
    }
}
async function refreshRunList() {
    const runs = await api.listRuns();
    const select = $("run-select");
    const previous = select.value;
    select.innerHTML = "";
    for (const run of runs) {
        const option = document.createElement("option");
        option.value = run.run_id;
        option.textContent = `${run.run_id} (${run.status})`;
        select.appendChild(option);
    }
    if (previous && runs.some((r) => r.run_id === previous))
        select.value = previous;
    if (!currentRun && runs.length > 0)
        await attach(runs[0].run_id);
}
async function control(action, speed) {
    if (!currentRun)
        return;
    try {
        const info = await api.control(currentRun.run_id, action, speed);
        if (model)
            model.status = info.status;
        setStatusLine();
    }
    catch (err) {
        showFormError(String(err));
    }
}
function showFormError(text) {
    $("form-error").textContent = text;
}
async function submit(result) {
    showFormError("");
    if (!result.ok || !currentRun) {
        showFormError(result.error ?? "no run attached");
        return;
    }
    try {
        const ack = await api.intervene(currentRun.run_id, result.command);
        showFormError(`queued, effective ${ack.effective_date}`);
    }
    catch (err) {
        showFormError(String(err)); // server rejection shown verbatim
    }
}
function val(id) {
    return $(id).value;
}
export function wireUp() {
    $("btn-refresh").addEventListener("click", refreshRunList);
    $("run-select").addEventListener("change", (e) => attach(e.target.value));
    $("btn-start").addEventListener("click", () => control("start"));
    $("btn-pause").addEventListener("click", () => control("pause"));
    $("btn-step").addEventListener("click", () => control("step_day"));
    $("btn-speed").addEventListener("click", () => control("set_speed", Number(val("speed-input"))));
    $("btn-capacity").addEventListener("click", () => submit(buildSetCapacity(val("form-capacity-site"), currentRun?.sites.map((s) => s.name) ?? [], val("form-capacity-value"))));
    $("btn-catchability").addEventListener("click", () => submit(buildScaleCatchability(val("form-q-factor"), val("form-q-cat"))));
    $("btn-campaign").addEventListener("click", () => submit(buildSetCampaignProb(val("form-campaign-cat"), val("form-campaign-p"))));
    $("btn-units").addEventListener("click", () => submit(buildChangeUnits(val("form-units-kind"), val("form-units-site"), currentRun?.sites.map((s) => s.name) ?? [], val("form-units-cat"), val("form-units-n"))));
    refreshRunList();
    setInterval(refreshRunList, 5000);
}
if (typeof document !== "undefined" && document.getElementById("run-select")) {
    wireUp();
}
