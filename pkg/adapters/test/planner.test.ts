import { describe, expect, it } from "vitest";

import { planFromPrompt, refinementPromptFrom } from "../src/planner.js";
import { isValid } from "../src/schemas.js";

describe("planFromPrompt", () => {
  it("extracts counted entities", () => {
    const plan = planFromPrompt("two dogs and a whale");
    const counts = Object.fromEntries(
      plan.questions.filter((q) => q.kind === "count").map((q) => [q.object, q.target_count]),
    );
    expect(counts).toEqual({ dogs: 2, whale: 1 });
  });

  it("gives single objects a count question too", () => {
    const plan = planFromPrompt("a bear");
    expect(plan.questions).toHaveLength(1);
    expect(plan.questions[0]).toMatchObject({
      kind: "count",
      object: "bear",
      target_count: 1,
      text: "Is there one bear?",
    });
  });

  it("wires color attributes to the count question", () => {
    const plan = planFromPrompt("a green umbrella and a yellow bird");
    const attrs = plan.questions.filter((q) => q.kind === "attribute");
    expect(attrs.map((q) => q.text)).toEqual([
      "Is the umbrella green?",
      "Is the bird yellow?",
    ]);
    const countIds = Object.fromEntries(
      plan.questions.filter((q) => q.kind === "count").map((q) => [q.object, q.id]),
    );
    for (const attr of attrs) {
      expect(attr.depends_on).toEqual([countIds[attr.object]]);
    }
  });

  it("emits exactly one count question per entity", () => {
    const plan = planFromPrompt("three boats on a lake near a lighthouse");
    const perObject = new Map<string, number>();
    for (const q of plan.questions) {
      if (q.kind === "count") {
        perObject.set(q.object, (perObject.get(q.object) ?? 0) + 1);
      }
    }
    for (const entity of plan.tuples.filter((t) => t.kind === "entity")) {
      expect(perObject.get(entity.subject)).toBe(1);
    }
  });

  it("produces schema-valid plan documents", () => {
    for (const prompt of [
      "two people are making pizza while a bear is watching them",
      "2 dogs and a whale, ocean adventure",
      "a red ball on a table",
    ]) {
      expect(isValid("plan_response", planFromPrompt(prompt))).toBe(true);
    }
  });
});

describe("refinementPromptFrom", () => {
  it("reconstructs fragments from questions", () => {
    const text = refinementPromptFrom([
      { id: "q1", text: "Are there two people?", kind: "count", object: "people", target_count: 2 },
      { id: "q2", text: "Is there one pizza?", kind: "count", object: "pizza", target_count: 1 },
      { id: "q3", text: "Are the people making pizza?", kind: "attribute", object: "people" },
    ]);
    expect(text).toBe("two people, one pizza, the people making pizza");
  });

  it("returns empty for no questions", () => {
    expect(refinementPromptFrom([])).toBe("");
  });
});
