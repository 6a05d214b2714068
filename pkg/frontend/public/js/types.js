// Mirrors the service JSON schemas; the UI consumes these verbatim and
// holds no business logic of its own.
export function isListView(view) {
    return view.level === "L1_list";
}
