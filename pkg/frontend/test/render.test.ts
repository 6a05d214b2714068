import { describe, expect, it } from "vitest";

import { renderPayload, renderRecommendations } from "../src/render.js";
import type { MoveRequest, PresentationStyle } from "../src/types.js";
import { overviewPayload, reportPayload } from "./fixtures.js";

const noop = { onMove: (_m: MoveRequest) => {}, onChoose: (_i: string) => {} };

function movesShown(root: HTMLElement): Set<string> {
  return new Set(
    Array.from(root.querySelectorAll<HTMLButtonElement>("button[data-move]")).map(
      (b) => b.dataset.move!,
    ),
  );
}

describe("interactivity gating", () => {
  it("renders no L3/L4 controls for a low-interactivity payload", () => {
    const view = renderPayload(overviewPayload(["back"]), noop);
    expect(movesShown(view)).toEqual(new Set(["back"]));
    expect(view.querySelector("button[data-move=what_reported]")).toBeNull();
    expect(view.querySelector("button[data-move=more_features]")).toBeNull();
    expect(view.querySelector("button[data-move=fine_grained]")).toBeNull();
  });

  it("renders every offered control for a high-interactivity overview", () => {
    const view = renderPayload(
      overviewPayload(["more_features", "what_reported", "back"]),
      noop,
    );
    expect(movesShown(view)).toEqual(
      new Set(["more_features", "what_reported", "back"]),
    );
    // one what_reported button per premise row
    const reported = view.querySelectorAll("button[data-move=what_reported]");
    expect(reported).toHaveLength(3);
  });

  it("renders fine-grained term buttons only when offered", () => {
    const view = renderPayload(reportPayload(), noop);
    const terms = Array.from(
      view.querySelectorAll<HTMLButtonElement>("button[data-move=fine_grained]"),
    ).map((b) => b.dataset.term);
    expect(terms).toEqual(["bed", "bedding"]);
  });

  it("gating is driven purely by available_moves, not by level", () => {
    const crippled = { ...reportPayload(), available_moves: ["back"] as const };
    const view = renderPayload({ ...crippled, available_moves: ["back"] }, noop);
    expect(movesShown(view)).toEqual(new Set(["back"]));
  });
});

describe("presentation styles", () => {
  const styles: PresentationStyle[] = ["text", "table", "bar_chart"];

  function numbersByFeature(root: HTMLElement): Record<string, [string, string]> {
    const out: Record<string, [string, string]> = {};
    root.querySelectorAll<HTMLElement>("[data-role=premise-row]").forEach((row) => {
      if (row.dataset.noData) return;
      out[row.dataset.feature!] = [row.dataset.pctPositive!, row.dataset.pctNegative!];
    });
    return out;
  }

  it("displays identical numbers for the same payload in all three styles", () => {
    const rendered = styles.map((style) =>
      numbersByFeature(renderPayload(overviewPayload(["back"], style), noop)),
    );
    expect(rendered[0]).toEqual({ room: ["75", "25"], price: ["40", "60"] });
    expect(rendered[1]).toEqual(rendered[0]);
    expect(rendered[2]).toEqual(rendered[0]);
  });

  it("renders percentages that sum to 100 in every style", () => {
    for (const style of styles) {
      const view = renderPayload(overviewPayload(["back"], style), noop);
      view.querySelectorAll<HTMLElement>("[data-role=premise-row]").forEach((row) => {
        if (row.dataset.noData) return;
        expect(
          Number(row.dataset.pctPositive) + Number(row.dataset.pctNegative),
        ).toBe(100);
      });
    }
  });

  it("draws bar widths proportional to the percentages", () => {
    const view = renderPayload(overviewPayload(["back"], "bar_chart"), noop);
    const room = view.querySelector("[data-feature=room]")!;
    const [positive, negative] = Array.from(room.querySelectorAll("rect"));
    expect(positive.getAttribute("width")).toBe("75");
    expect(negative.getAttribute("width")).toBe("25");
    expect(positive.getAttribute("x")).toBe("0");
    expect(negative.getAttribute("x")).toBe("75");
    const svg = room.querySelector("svg")!;
    expect(svg.getAttribute("viewBox")).toBe("0 0 100 12");
  });

  it("marks no-data premises instead of inventing numbers", () => {
    for (const style of styles) {
      const view = renderPayload(overviewPayload(["back"], style), noop);
      const staff = view.querySelector<HTMLElement>("[data-feature=staff]")!;
      expect(staff.dataset.noData).toBe("true");
      expect(staff.dataset.pctPositive).toBeUndefined();
    }
  });

  it("text style embeds the numbers in template sentences", () => {
    const view = renderPayload(overviewPayload(["back"], "text"), noop);
    expect(view.textContent).toContain(
      "Around 75% of guests who wrote about the room commented positively " +
        "about it, although 25% expressed complaints.",
    );
    // 75 >= 50: refutation clause follows
    expect(view.textContent).toContain(
      "Still, most of the feedback about the room was positive.",
    );
  });
});

describe("excerpts and claim", () => {
  it("separates backing from rebuttal excerpts", () => {
    const view = renderPayload(reportPayload(), noop);
    const backing = view.querySelector("[data-role=backing]")!;
    const rebuttal = view.querySelector("[data-role=rebuttal]")!;
    expect(backing.querySelectorAll("li")).toHaveLength(2);
    expect(rebuttal.querySelectorAll("li")).toHaveLength(1);
    expect(rebuttal.textContent).toContain("The bedding was worn");
  });

  it("claim shows the predicted rating as circles", () => {
    const view = renderPayload(overviewPayload(["back"]), noop);
    expect(view.querySelector("[data-role=claim]")!.textContent).toContain("●●●●○");
  });
});

describe("recommendation list", () => {
  it("renders a more_why control and choose control per item", () => {
    const list = renderRecommendations(
      [
        { item_id: "h01", predicted_rating: 4.4, circles: 4 },
        { item_id: "h02", predicted_rating: 3.1, circles: 3 },
      ],
      noop,
    );
    expect(list.querySelectorAll("button[data-move=more_why]")).toHaveLength(2);
    expect(list.querySelectorAll("button[data-action=choose]")).toHaveLength(2);
  });

  it("clicking more_why emits the move with the item id", () => {
    const seen: MoveRequest[] = [];
    const list = renderRecommendations(
      [{ item_id: "h07", predicted_rating: 4.0, circles: 4 }],
      { ...noop, onMove: (m) => seen.push(m) },
    );
    list.querySelector<HTMLButtonElement>("button[data-move=more_why]")!.click();
    expect(seen).toEqual([{ move: "more_why", item_id: "h07" }]);
  });
});
