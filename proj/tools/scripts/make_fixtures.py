#!/usr/bin/env python3
"""Writes the scripted-response fixtures from the candidate and corpus sources."""
import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parents[2]
FIX = ROOT / "fixtures"


def read(rel):
    return (ROOT / rel).read_text()


def response(foo, pre, preamble="Here is the precondition."):
    return f"{preamble}\n\n```java\n{foo.rstrip()}\n\n{pre.rstrip()}\n```\n"


def write_jsonl(name, rows):
    with open(FIX / name, "w", newline="\n") as f:
        for r in rows:
            f.write(json.dumps(r, sort_keys=True) + "\n")


def main():
    foo = read("corpus/builtin/sorting_copy.mini")
    stages = ["initial", "strong", "regressed", "final"]
    write_jsonl("motivating.jsonl", [
        {"program_id": "sorting_copy",
         "response": response(foo, read(f"fixtures/candidates/motivating_{s}.mini"))}
        for s in stages])
    write_jsonl("initial_only.jsonl", [
        {"program_id": "sorting_copy",
         "response": response(foo, read("fixtures/candidates/motivating_initial.mini"))}])
    write_jsonl("bench_script.jsonl", bench_script())


def bench_script(iterations=5):
    manifest = json.loads(read("corpus/builtin/corpus.json"))
    candidates = ROOT / "fixtures/candidates"
    rows = []
    for it in range(1, iterations + 1):
        for entry in manifest["programs"]:
            pid = entry["id"]
            foo = read(f"corpus/builtin/{entry['file']}")
            truth = read(f"corpus/builtin/{entry['truth']}")
            if pid == "sorting_copy":
                pres = [(candidates / f"motivating_{s}.mini").read_text()
                        for s in ["initial", "strong", "regressed", "final"]]
            elif pid == "add_no_wrap":
                pres = [(candidates / "add_no_wrap_math.mini").read_text(), truth]
            elif pid == "search_hundred":
                first = (candidates / "search_hundred_first.mini").read_text()
                pres = [first, first, first] if it <= 3 else [first, truth]
            elif pid == "exists_pair_sum_zero" and it == 2:
                rows += [{"program_id": pid, "response": "I cannot determine a precondition."}] * 2
                continue
            else:
                pres = [truth]
            rows += [{"program_id": pid, "response": response(foo, pre)} for pre in pres]
    return rows


if __name__ == "__main__":
    main()
