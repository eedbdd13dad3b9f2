/**
 * Reference adapter server for the v1 wire protocol.
 *
 * One process multiplexes all six backend roles over deterministic
 * local implementations: a pattern-grammar planner, blob-analysis
 * vision for VQA/pointing/segmentation, a procedural latent renderer
 * honoring the preserve contract, and an n-gram BLEU scorer. Requests
 * are validated against the engine's published schemas; violations get
 * HTTP 422, handler failures 500, and model-unavailable states 503.
 */

import express, { Express, Request, Response } from "express";

import { scoreVideoAgainstPrompt } from "./bleu.js";
import { renderVideo, Region } from "./generate.js";
import { planFromPrompt, refinementPromptFrom, QuestionDoc } from "./planner.js";
import { isValid, validationErrors } from "./schemas.js";
import { countObjects, foregroundBlobs, pointBiggest, segmentAtPoint } from "./vision.js";
import { readTensorRef, writeTensorRef, TensorRef } from "./wire.js";

export const ROLES = ["llm_planner", "vqa", "pointer", "segmenter", "t2v", "scorer"];

const BACKGROUND_NOUNS = new Set([
  "background", "sky", "ground", "floor", "wall", "field", "grass",
  "water", "ocean", "sea", "lake", "road", "street", "room", "scene",
]);

type Handler = (body: Record<string, unknown>) => Record<string, unknown>;

function endpoint(app: Express, path: string, schema: string, handler: Handler): void {
  app.post(path, (req: Request, res: Response) => {
    const errors = validationErrors(schema, req.body);
    if (errors) {
      res.status(422).json({ error: "schema_violation", detail: errors });
      return;
    }
    try {
      res.json(handler(req.body as Record<string, unknown>));
    } catch (err) {
      const message = err instanceof Error ? err.message : String(err);
      res.status(500).json({ error: "internal", detail: message });
    }
  });
}

export function createApp(): Express {
  const app = express();
  app.use(express.json({ limit: "64mb" }));

  app.get("/healthz", (_req, res) => {
    res.json({ status: "ok", roles: ROLES });
  });

  endpoint(app, "/v1/plan", "plan_request", (body) => {
    return planFromPrompt(body.prompt as string) as unknown as Record<string, unknown>;
  });

  endpoint(app, "/v1/refineprompt", "refineprompt_request", (body) => {
    const questions = body.questions as QuestionDoc[];
    const text = refinementPromptFrom(questions);
    return { refinement_prompt: text || (body.original_prompt as string) };
  });

  endpoint(app, "/v1/vqa", "vqa_request", (body) => {
    const task = body.task as string;
    const image = readTensorRef(body.image as TensorRef);
    if (task === "count") {
      const observed = countObjects(image);
      const requested = body.n_p as number;
      return {
        answer: observed === requested ? "yes" : "no",
        n_v: observed,
        reasoning: `detected ${observed} distinct foreground region(s)`,
      };
    }
    if (task === "attribute") {
      const present = foregroundBlobs(image).length > 0;
      return {
        answer: present ? "yes" : "no",
        reasoning: present
          ? "foreground content is present where the statement applies"
          : "no foreground content found",
      };
    }
    // select_objects: rank by correct answers, skip scenery nouns
    const pairs = body.qa_pairs as { object: string; binary: number }[];
    const scores = new Map<string, { correct: number; total: number }>();
    for (const pair of pairs) {
      const entry = scores.get(pair.object) ?? { correct: 0, total: 0 };
      entry.correct += pair.binary;
      entry.total += 1;
      scores.set(pair.object, entry);
    }
    const ranked = (body.objects as string[])
      .filter((name) => !BACKGROUND_NOUNS.has(name.toLowerCase()))
      .filter((name) => (scores.get(name)?.correct ?? 0) >= 1)
      .sort((a, b) => {
        const sa = scores.get(a) ?? { correct: 0, total: 0 };
        const sb = scores.get(b) ?? { correct: 0, total: 0 };
        return sb.correct - sa.correct || sb.total - sa.total || a.localeCompare(b);
      });
    const selected = (body.allow_multi as boolean) ? ranked : ranked.slice(0, 1);
    return { objects: selected, reasoning: "ranked by correct answers" };
  });

  endpoint(app, "/v1/point", "point_request", (body) => {
    const image = readTensorRef(body.image as TensorRef);
    const prompt = body.prompt as string;
    const match = prompt.match(/\b(\d+)\b/);
    const n = match ? parseInt(match[1], 10) : 1;
    return { points: pointBiggest(image, n) };
  });

  endpoint(app, "/v1/segment", "segment_request", (body) => {
    const image = readTensorRef(body.image as TensorRef);
    const point = body.point as { x: number; y: number };
    const mask = segmentAtPoint(image, point.x, point.y);
    return { mask: writeTensorRef(mask) };
  });

  endpoint(app, "/v1/generate", "generate_request", (body) => {
    const dims = body.dims as { frames: number; height: number; width: number };
    const regions: Region[] = (body.prompt_regions as { weights: TensorRef; prompt: string }[]).map(
      (region) => ({ weights: readTensorRef(region.weights), prompt: region.prompt }),
    );
    const noise = readTensorRef(body.noise as TensorRef);
    const referenceDoc = body.reference as { video: TensorRef; pixel_mask: TensorRef } | undefined;
    const reference = referenceDoc
      ? {
          video: readTensorRef(referenceDoc.video),
          pixelMask: readTensorRef(referenceDoc.pixel_mask),
        }
      : undefined;
    const video = renderVideo({
      regions,
      noise,
      frames: dims.frames,
      height: dims.height,
      width: dims.width,
      reference,
    });
    return { video: writeTensorRef(video) };
  });

  endpoint(app, "/v1/score", "score_request", (body) => {
    const video = readTensorRef(body.video as TensorRef);
    return { score: scoreVideoAgainstPrompt(body.prompt as string, video) };
  });

  return app;
}

function main(): void {
  const portFlag = process.argv.indexOf("--port");
  const port = portFlag >= 0 ? parseInt(process.argv[portFlag + 1], 10) : 8080;
  const app = createApp();
  const server = app.listen(port, "127.0.0.1", () => {
    const address = server.address();
    const bound = typeof address === "object" && address ? address.port : port;
    // the port line is machine-read by the conformance harness
    console.log(`videorepair-adapter listening on http://127.0.0.1:${bound}`);
  });
}

if (process.argv[1] && process.argv[1].endsWith("server.js")) {
  main();
}
