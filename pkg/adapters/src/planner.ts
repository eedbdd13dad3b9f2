/**
 * In-process planner standing in for a hosted language model: prompt
 * decomposition into tuples and dependency-wired questions, plus the
 * inverse direction (questions back into a scene description).
 *
 * The parsing is a deterministic pattern grammar, not NLP: number
 * words, a color lexicon and a few connective splitters. It covers the
 * compositional prompt shapes the engine cares about (counts, colors,
 * simple interactions) and always emits a protocol-valid plan.
 */

const NUMBER_WORDS: Record<string, number> = {
  a: 1, an: 1, one: 1, two: 2, three: 3, four: 4,
  five: 5, six: 6, seven: 7, eight: 8, nine: 9, ten: 10,
};

const COLORS = new Set([
  "red", "green", "blue", "yellow", "orange", "purple", "pink",
  "black", "white", "brown", "gray", "grey", "golden",
]);

const STOPWORDS = new Set([
  "the", "is", "are", "on", "in", "at", "of", "with", "and",
  "while", "them", "their", "there", "it", "its", "to",
]);

const COUNT_TO_WORD: Record<number, string> = {
  1: "one", 2: "two", 3: "three", 4: "four", 5: "five",
  6: "six", 7: "seven", 8: "eight", 9: "nine", 10: "ten",
};

export interface TupleDoc {
  id: string;
  kind: "entity" | "attribute" | "relationship";
  subject: string;
  attribute_or_relation?: string;
  object2?: string;
}

export interface QuestionDoc {
  id: string;
  text: string;
  kind: "count" | "attribute";
  object: string;
  target_count?: number;
  depends_on?: string[];
}

export interface PlanDoc {
  tuples: TupleDoc[];
  questions: QuestionDoc[];
}

interface Entity {
  name: string;
  count: number;
  colors: string[];
}

function tokenize(text: string): string[] {
  return text.toLowerCase().replace(/[^a-z0-9\s-]/g, " ").split(/\s+/).filter(Boolean);
}

function parseEntities(prompt: string): Entity[] {
  const segments = prompt.toLowerCase().split(/,| and | while | with | next to | near /);
  const entities: Entity[] = [];
  for (const segment of segments) {
    const tokens = tokenize(segment);
    let count = 1;
    let colors: string[] = [];
    let pending: string | undefined;
    for (const token of tokens) {
      if (token in NUMBER_WORDS) {
        count = NUMBER_WORDS[token];
        continue;
      }
      if (/^\d+$/.test(token)) {
        count = parseInt(token, 10);
        continue;
      }
      if (COLORS.has(token)) {
        colors.push(token);
        continue;
      }
      if (STOPWORDS.has(token) || token.endsWith("ing")) {
        continue;
      }
      pending = token; // last plain noun-ish token wins
    }
    if (pending && !entities.some((e) => e.name === pending)) {
      entities.push({ name: pending, count: Math.max(1, Math.min(10, count)), colors });
    }
  }
  return entities;
}

function countQuestionText(name: string, count: number): string {
  const word = COUNT_TO_WORD[count] ?? String(count);
  return count === 1 ? `Is there one ${name}?` : `Are there ${word} ${name}?`;
}

export function planFromPrompt(prompt: string): PlanDoc {
  const entities = parseEntities(prompt);
  const tuples: TupleDoc[] = [];
  const questions: QuestionDoc[] = [];
  let tupleId = 0;
  let questionId = 0;

  for (const entity of entities) {
    tupleId += 1;
    tuples.push({ id: `t${tupleId}`, kind: "entity", subject: entity.name });
    questionId += 1;
    const countId = `q${questionId}`;
    questions.push({
      id: countId,
      text: countQuestionText(entity.name, entity.count),
      kind: "count",
      object: entity.name,
      target_count: entity.count,
      depends_on: [],
    });
    for (const color of entity.colors) {
      tupleId += 1;
      tuples.push({
        id: `t${tupleId}`,
        kind: "attribute",
        subject: entity.name,
        attribute_or_relation: color,
      });
      questionId += 1;
      questions.push({
        id: `q${questionId}`,
        text: `Is the ${entity.name} ${color}?`,
        kind: "attribute",
        object: entity.name,
        depends_on: [countId],
      });
    }
  }
  return { tuples, questions };
}

/** Turn a question back into a declarative fragment. */
function fragment(question: QuestionDoc): string {
  if (question.kind === "count" && question.target_count !== undefined) {
    const word = COUNT_TO_WORD[question.target_count] ?? String(question.target_count);
    return `${word} ${question.object}`;
  }
  const text = question.text.replace(/\?$/, "");
  const stripped = text.replace(/^(is|are)\s+(there\s+)?/i, "");
  return stripped.trim().toLowerCase();
}

export function refinementPromptFrom(questions: QuestionDoc[]): string {
  if (questions.length === 0) {
    return "";
  }
  const fragments = questions.map(fragment).filter(Boolean);
  return fragments.join(", ");
}
