import { ApiClient } from "./api.js";
import { App } from "./app.js";
const FEATURES = [
    "room", "price", "staff", "location", "facilities",
    "bathroom", "ambience", "food_and_beverages", "comfort", "checking",
];
function option(value, text) {
    const node = document.createElement("option");
    node.value = value;
    node.textContent = text ?? value.replace(/_/g, " ");
    return node;
}
function buildSetupForm(onSubmit) {
    const form = document.createElement("form");
    form.className = "setup";
    form.append(Object.assign(document.createElement("h2"), {
        textContent: "Which five hotel features matter most to you, in order?",
    }));
    const selects = [];
    for (let rank = 1; rank <= 5; rank++) {
        const select = document.createElement("select");
        select.name = `rank${rank}`;
        select.required = true;
        select.append(option("", `rank ${rank}…`));
        for (const feature of FEATURES)
            select.append(option(feature));
        selects.push(select);
        const wrap = document.createElement("label");
        wrap.append(`${rank}. `, select);
        form.append(wrap);
    }
    const condition = document.createElement("div");
    condition.className = "condition";
    const interactivity = document.createElement("select");
    interactivity.name = "interactivity";
    interactivity.append(option("high"), option("low"));
    const style = document.createElement("select");
    style.name = "style";
    style.append(option("table"), option("bar_chart", "bar chart"), option("text"));
    condition.append("condition: ", interactivity, style);
    form.append(condition);
    const submit = document.createElement("button");
    submit.type = "submit";
    submit.textContent = "Show my recommendations";
    form.append(submit);
    form.addEventListener("submit", (ev) => {
        ev.preventDefault();
        const prefs = selects.map((s) => s.value);
        if (new Set(prefs).size !== 5 || prefs.includes("")) {
            form.querySelector(".setup-error")?.remove();
            const error = document.createElement("p");
            error.className = "setup-error";
            error.textContent = "Please pick five distinct features.";
            form.append(error);
            return;
        }
        onSubmit(prefs, interactivity.value, style.value);
    });
    return form;
}
function boot() {
    const rootNode = document.querySelector("#app");
    if (!rootNode)
        throw new Error("missing #app container");
    const client = new ApiClient("");
    const app = new App(client, rootNode);
    const form = buildSetupForm((prefs, interactivity, style) => {
        form.remove();
        void app.start(prefs, interactivity, style).catch((error) => {
            const banner = document.createElement("div");
            banner.className = "banner banner-error";
            banner.textContent = `Could not start a session: ${error.message ?? error}`;
            rootNode.append(banner);
        });
    });
    rootNode.append(form);
}
boot();
