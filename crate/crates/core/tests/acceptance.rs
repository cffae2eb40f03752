//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero when any fails.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use curate::bench::{bench_heuristics, bench_minhash, HEURISTIC_FLOOR_MB_S, MINHASH_FLOOR_MB_S};
use curate::corpus::read_jsonl_shard;
use curate::dedup::{jaccard, matching_positions, minhash_signature, shingles, NUM_PERM};
use curate::heuristics::repetition_stats_text;
use curate::heuristics::segment::{for_each_word, paragraph_spans};
use curate::lang::{LmConfig, NgramLm};
use curate::learned::{LinearClassifier, TrainConfig};
use curate::mixer::{default_depths, default_lengths, haystack_grid, needle_offset, write_grid, NeedleSpec};
use curate::pipeline::{
    run_pipeline, shard_file, validate_config, MixtureReport, PipelineConfig, RunOptions, StageSpec,
};
use curate::synth::{
    dedup_corpus, default_config, generate_corpus, quality_task, shared_passage, train_models, write_corpus, Lexicon,
    SynthConfig, TrainSizes,
};
use curate::tokenizer::{is_decimal_digit, train_bpe, TokenizerConfig};
use curate::{dedup_normalize, Document};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn temp() -> Result<tempfile::TempDir, String> {
    tempfile::tempdir().map_err(err)
}

fn read_output(dir: &Path, shards: usize) -> Result<Vec<Document>, String> {
    let mut docs = Vec::new();
    for i in 0..shards {
        docs.extend(read_jsonl_shard(&shard_file(dir, i)).map_err(err)?.0);
    }
    Ok(docs)
}

fn run(cfg: &PipelineConfig, opts: &RunOptions) -> Result<curate::pipeline::RunOutcome, String> {
    let plan = validate_config(cfg).map_err(err)?;
    run_pipeline(&plan, opts).map_err(err)
}

fn words_joined(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for_each_word(text, |w| {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(w);
    });
    out
}

// 1
fn dedup_correctness() -> Outcome {
    let seed = 11;
    let docs = dedup_corpus(2000, 0.1, 0.1, 10, seed);
    let dir = temp()?;
    let input = dir.path().join("input");
    write_corpus(&docs, &input, 4).map_err(err)?;
    let cfg = PipelineConfig {
        input: vec![input],
        output: dir.path().join("out"),
        work_dir: None,
        shards: 4,
        workers: 1,
        seed,
        tokenizer: None,
        stages: vec![StageSpec::new("minhash_dedup"), StageSpec::new("exact_dedup"), StageSpec::new("substring_dedup")],
        provided_meta: Vec::new(),
    };
    let t = Instant::now();
    run(&cfg, &RunOptions::default())?;
    let secs = t.elapsed().as_secs_f64();
    let out = read_output(&cfg.output, 4)?;
    let survivors: HashMap<&str, &Document> = out.iter().map(|d| (d.id.as_str(), d)).collect();

    let mut groups: HashMap<String, Vec<&str>> = HashMap::new();
    for d in &docs {
        groups.entry(dedup_normalize(&d.text)).or_default().push(&d.id);
    }
    let (mut exact_dups, mut exact_left) = (0, 0);
    for ids in groups.values().filter(|g| g.len() > 1) {
        exact_dups += ids.len() - 1;
        let alive = ids.iter().filter(|id| survivors.contains_key(*id)).count();
        exact_left += alive.saturating_sub(1);
    }

    // exhaustive Jaccard over every pair
    let sh: Vec<Vec<u64>> = docs.iter().map(|d| shingles(&d.text)).collect();
    let (mut near_pairs, mut near_removed) = (0usize, 0usize);
    for i in 0..docs.len() {
        for j in i + 1..docs.len() {
            let (a, b) = (sh[i].len() as f64, sh[j].len() as f64);
            if a.min(b) / a.max(b) <= 0.707 {
                continue;
            }
            if jaccard(&sh[i], &sh[j]) > 0.707 {
                near_pairs += 1;
                if !(survivors.contains_key(docs[i].id.as_str()) && survivors.contains_key(docs[j].id.as_str())) {
                    near_removed += 1;
                }
            }
        }
    }
    let recall = near_removed as f64 / near_pairs.max(1) as f64;

    let passage = words_joined(&dedup_normalize(&shared_passage(&Lexicon::new(), seed)));
    let holds = |t: &str| words_joined(&dedup_normalize(t)).contains(&passage);
    let before = docs.iter().filter(|d| holds(&d.text)).count();
    let after = out.iter().filter(|d| holds(&d.text)).count();

    check(
        exact_left == 0 && near_pairs > 0 && recall >= 0.99 && before > 1 && after == 1 && secs < 60.0,
        format!(
            "exact dups {exact_dups} left {exact_left}; near pairs {near_pairs} removed {near_removed} \
             ({:.2}%); passage in {before} docs -> {after}; {secs:.1}s single-threaded",
            recall * 100.0
        ),
    )
}

// 2
fn minhash_fidelity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let vocab: Vec<String> = (0..5000).map(|i| format!("w{i}")).collect();
    let (mut ok, mut total) = (0, 0);
    for p in 0..500 {
        let len = rng.gen_range(80..400);
        let base: Vec<&str> = (0..len).map(|_| vocab[rng.gen_range(0..vocab.len())].as_str()).collect();
        let mut other = base.clone();
        let rate = p as f64 / 500.0 * 0.5;
        for w in other.iter_mut() {
            if rng.gen_bool(rate) {
                *w = vocab[rng.gen_range(0..vocab.len())].as_str();
            }
        }
        let (sa, sb) = (shingles(&base.join(" ")), shingles(&other.join(" ")));
        let j = jaccard(&sa, &sb);
        let (Some(a), Some(b)) = (minhash_signature(&sa), minhash_signature(&sb)) else {
            return Err("empty signature".into());
        };
        let m = matching_positions(&a, &b) as f64;
        let k = NUM_PERM as f64;
        let sigma = (k * j * (1.0 - j)).sqrt();
        total += 1;
        if (m - k * j).abs() <= 3.0 * sigma {
            ok += 1;
        }
    }
    let frac = ok as f64 / total as f64;
    check(frac >= 0.99, format!("{ok}/{total} pairs within 3 sigma of Binomial({NUM_PERM}, J) ({:.1}%)", frac * 100.0))
}

/// Line, paragraph and n-gram statistics by direct pairwise comparison.
fn repetition_oracle(text: &str) -> [f64; 13] {
    fn units(us: Vec<String>) -> (f64, f64) {
        let us: Vec<String> = us.into_iter().filter(|u| !u.trim().is_empty()).map(|u| dedup_normalize(&u)).collect();
        if us.is_empty() {
            return (0.0, 0.0);
        }
        let (mut dup, mut dup_chars, mut chars) = (0usize, 0usize, 0usize);
        for (i, u) in us.iter().enumerate() {
            let c = u.chars().count();
            chars += c;
            if us.iter().enumerate().any(|(j, v)| j != i && v == u) {
                dup += 1;
                dup_chars += c;
            }
        }
        let cf = if chars == 0 { 0.0 } else { dup_chars as f64 / chars as f64 };
        (dup as f64 / us.len() as f64, cf)
    }
    let mut out = [0.0; 13];
    (out[0], out[2]) = units(text.split('\n').map(str::to_string).collect());
    (out[1], out[3]) = units(paragraph_spans(text).into_iter().map(|r| text[r].to_string()).collect());

    let normalized = dedup_normalize(text);
    let mut words: Vec<&str> = Vec::new();
    for_each_word(&normalized, |w| words.push(w));
    if words.is_empty() {
        return out;
    }
    let chars: Vec<usize> = words.iter().map(|w| w.chars().count()).collect();
    let total: usize = chars.iter().sum();
    let spaced = total + words.len() - 1;
    for (slot, n) in [2usize, 3, 4].into_iter().enumerate() {
        if words.len() < n {
            continue;
        }
        let m = words.len() - n + 1;
        let mut best = (0usize, 0usize);
        for i in 0..m {
            let c = (0..m).filter(|&j| words[j..j + n] == words[i..i + n]).count();
            let ch: usize = chars[i..i + n].iter().sum::<usize>() + n - 1;
            if c > best.0 || (c == best.0 && ch > best.1) {
                best = (c, ch);
            }
        }
        if best.0 > 1 {
            out[4 + slot] = ((best.0 * best.1) as f64 / spaced as f64).min(1.0);
        }
    }
    if total == 0 {
        return out;
    }
    for (slot, n) in (5usize..=10).enumerate() {
        if words.len() < n {
            continue;
        }
        let m = words.len() - n + 1;
        let mut covered = vec![false; words.len()];
        for i in 0..m {
            if (0..m).any(|j| j != i && words[j..j + n] == words[i..i + n]) {
                covered[i..i + n].iter_mut().for_each(|c| *c = true);
            }
        }
        let dup: usize = covered.iter().zip(&chars).filter(|(c, _)| **c).map(|(_, c)| c).sum();
        out[7 + slot] = dup as f64 / total as f64;
    }
    out
}

// 3
fn repetition_exact() -> Outcome {
    let mut texts: Vec<String> =
        generate_corpus(&SynthConfig { docs: 900, seed: 3 }).into_iter().map(|d| d.text).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pool = ["the", "cat", "sat", "on", "mat", "and", "dog", "ran", "Fast!", "fast", "\n", "\n\n"];
    while texts.len() < 1000 {
        let n = rng.gen_range(1..=2000);
        let k = rng.gen_range(2..pool.len());
        let mut s = String::new();
        for _ in 0..n {
            let w = pool[rng.gen_range(0..k)];
            if !s.is_empty() && !w.starts_with('\n') {
                s.push(' ');
            }
            s.push_str(w);
        }
        texts.push(s);
    }
    let mut max_words = 0;
    let mut mismatches = Vec::new();
    for (i, t) in texts.iter().enumerate() {
        let mut n = 0;
        for_each_word(t, |_| n += 1);
        max_words = max_words.max(n);
        let s = repetition_stats_text(t);
        let got: Vec<f64> = [s.dup_line_frac, s.dup_para_frac, s.dup_line_char_frac, s.dup_para_char_frac]
            .into_iter()
            .chain(s.top_ngram_char_frac)
            .chain(s.dup_ngram_char_frac)
            .collect();
        let want = repetition_oracle(t);
        if got.iter().zip(want.iter()).any(|(a, b)| a.to_bits() != b.to_bits()) {
            mismatches.push(i);
        }
    }
    check(
        mismatches.is_empty() && max_words <= 2000,
        format!(
            "{} docs (max {max_words} words), {} differ from the pairwise oracle{}",
            texts.len(),
            mismatches.len(),
            mismatches.first().map(|i| format!(", first #{i}")).unwrap_or_default()
        ),
    )
}

// 4
fn kn_lm() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut lines = Vec::new();
    for _ in 0..400 {
        let n = rng.gen_range(3..20);
        let line: Vec<String> = (0..n).map(|_| format!("v{}", rng.gen_range(0..100))).collect();
        lines.push(line.join(" "));
    }
    let text = lines.join("\n");
    let mut worst: f64 = 0.0;
    for boundaries in [false, true] {
        let m = NgramLm::train([text.as_str()], LmConfig { order: 3, min_count: 1, boundaries }).map_err(err)?;
        let support = m.support();
        let mut ctxs = m.top_contexts();
        ctxs.push(vec![]);
        for _ in 0..50 {
            ctxs.push((0..2).map(|_| m.word_id(&format!("v{}", rng.gen_range(0..120)))).collect());
        }
        for ctx in &ctxs {
            let s: f64 = support.iter().map(|&w| m.prob(ctx, w)).sum();
            worst = worst.max((s - 1.0).abs());
        }
    }
    let m = NgramLm::train(["a a b a b"], LmConfig { order: 2, min_count: 2, boundaries: false }).map_err(err)?;
    let (a, b, unk) = (m.word_id("a"), m.word_id("b"), m.word_id("zzz"));
    let table = [
        (vec![], a, 1.0 / 2.0),
        (vec![], b, 1.0 / 3.0),
        (vec![], unk, 1.0 / 6.0),
        (vec![a], a, 5.0 / 12.0),
        (vec![a], b, 1.0 / 2.0),
        (vec![a], unk, 1.0 / 12.0),
        (vec![b], a, 3.0 / 4.0),
        (vec![b], b, 1.0 / 6.0),
        (vec![b], unk, 1.0 / 12.0),
    ];
    let off = table.iter().filter(|(h, w, p)| (m.prob(h, *w) - p).abs() > 1e-12).count();
    check(
        worst <= 1e-6 && off == 0,
        format!("max |sum - 1| = {worst:.2e} over vocab-100 contexts; {off}/9 hand-table entries differ"),
    )
}

fn random_unicode(rng: &mut ChaCha8Rng) -> String {
    let len = rng.gen_range(0..40);
    (0..len)
        .map(|_| match rng.gen_range(0..4) {
            0 => rng.gen_range(' '..='~'),
            1 => rng.gen_range('\u{0}'..='\u{7ff}'),
            2 => rng.gen_range('\u{800}'..='\u{ffff}'),
            _ => rng.gen_range('\u{10000}'..='\u{10ffff}'),
        })
        .collect()
}

// 5
fn tokenizer_props() -> Outcome {
    let mut texts: Vec<String> =
        generate_corpus(&SynthConfig { docs: 600, seed: 5 }).into_iter().map(|d| d.text).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..300 {
        texts.push(format!(
            "In {} the price was {} dollars, up {}% from {}.",
            rng.gen_range(1900..2100),
            rng.gen_range(10..100_000),
            rng.gen_range(1..100),
            rng.gen_range(1900..2100)
        ));
    }
    let cfg = TokenizerConfig { vocab_size: 3000, ..Default::default() };
    let tok = train_bpe(texts.iter().map(String::as_str), &cfg).map_err(err)?;
    let again = train_bpe(texts.iter().map(String::as_str), &cfg).map_err(err)?;
    let dir = temp()?;
    let (p1, p2) = (dir.path().join("a.json"), dir.path().join("b.json"));
    tok.save(&p1).map_err(err)?;
    again.save(&p2).map_err(err)?;
    let deterministic = std::fs::read(&p1).map_err(err)? == std::fs::read(&p2).map_err(err)?;

    let mut multi_digit = 0;
    for id in 0..tok.vocab_size() as u32 {
        if let Ok(b) = tok.token_bytes(id) {
            if String::from_utf8_lossy(&b).chars().filter(|&c| is_decimal_digit(c)).count() > 1 {
                multi_digit += 1;
            }
        }
    }
    let year = tok.encode("2023");
    let year_ok = year.len() == 4
        && year
            .iter()
            .zip("2023".chars())
            .all(|(&id, c)| tok.token_bytes(id).is_ok_and(|b| b == c.to_string().as_bytes()));

    let mut round_trip_fail = 0;
    for _ in 0..10_000 {
        let s = random_unicode(&mut rng);
        if tok.decode(&tok.encode(&s)).ok().as_deref() != Some(s.as_str()) {
            round_trip_fail += 1;
        }
    }
    check(
        round_trip_fail == 0 && multi_digit == 0 && year_ok && deterministic,
        format!(
            "round trip failures {round_trip_fail}/10000; multi-digit pieces {multi_digit}; \
             \"2023\" -> {} tokens; identical retrain: {deterministic}",
            year.len()
        ),
    )
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn auc(pos: &[f64], neg: &[f64]) -> f64 {
    let mut wins = 0.0;
    for &p in pos {
        for &n in neg {
            wins += if p > n {
                1.0
            } else if p == n {
                0.5
            } else {
                0.0
            };
        }
    }
    wins / (pos.len() * neg.len()) as f64
}

// 6
fn quality_auc() -> Outcome {
    let (pos, neg) = quality_task(1000, 6);
    let (hpos, hneg) = quality_task(1000, 66);
    let m = LinearClassifier::train(&refs(&pos), &refs(&neg), &TrainConfig::default()).map_err(err)?;
    let sp: Vec<f64> = hpos.iter().map(|t| m.score(t)).collect();
    let sn: Vec<f64> = hneg.iter().map(|t| m.score(t)).collect();
    let a = auc(&sp, &sn);
    check(a >= 0.95, format!("held-out AUC {a:.4} on 1000+1000"))
}

fn tree_bytes(dir: &Path) -> Result<BTreeMap<PathBuf, Vec<u8>>, String> {
    let mut out = BTreeMap::new();
    for e in std::fs::read_dir(dir).map_err(err)? {
        let p = e.map_err(err)?.path();
        let name = p.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        if p.is_file() && name != "throughput.json" {
            out.insert(PathBuf::from(name), std::fs::read(&p).map_err(err)?);
        }
    }
    Ok(out)
}

struct Cascade {
    _dir: tempfile::TempDir,
    root: PathBuf,
    base: PipelineConfig,
    docs: usize,
}

fn cascade(docs: usize) -> Result<Cascade, String> {
    let dir = temp()?;
    let root = dir.path().to_path_buf();
    let models = train_models(&root.join("models"), 7, &TrainSizes::default()).map_err(err)?;
    let input = root.join("input");
    write_corpus(&generate_corpus(&SynthConfig { docs, seed: 7 }), &input, 8).map_err(err)?;
    let base = default_config(&input, &root.join("out"), &models, 8, 7);
    Ok(Cascade { _dir: dir, root, base, docs })
}

// 7
fn pipeline_determinism(c: &Cascade) -> Outcome {
    let mut trees = Vec::new();
    let mut docs_out = 0;
    for workers in [1, 4, 16] {
        let mut cfg = c.base.clone();
        cfg.workers = workers;
        cfg.output = c.root.join(format!("out-w{workers}"));
        let o = run(&cfg, &RunOptions::default())?;
        docs_out = o.report.docs;
        trees.push((format!("workers={workers}"), tree_bytes(&cfg.output)?));
    }

    // clean stop after a stage, then resume
    let mut cfg = c.base.clone();
    cfg.output = c.root.join("out-resume");
    let stopped = run(&cfg, &RunOptions { resume: false, stop_after: Some("minhash_dedup".into()) })?;
    if stopped.completed {
        return Err("run did not stop at minhash_dedup".into());
    }
    run(&cfg, &RunOptions { resume: true, stop_after: None })?;
    trees.push(("stop+resume".into(), tree_bytes(&cfg.output)?));

    // a stage killed mid-write: marker missing and a shard truncated
    let mut cfg = c.base.clone();
    cfg.output = c.root.join("out-crash");
    run(&cfg, &RunOptions { resume: false, stop_after: Some("coherence".into()) })?;
    let stages = cfg.output.join("work").join("stages");
    let mut dirs: Vec<PathBuf> =
        std::fs::read_dir(&stages).map_err(err)?.filter_map(|e| e.ok().map(|e| e.path())).collect();
    dirs.sort();
    let last = dirs.last().ok_or("no stage directories")?;
    std::fs::remove_file(last.join("DONE")).map_err(err)?;
    let shard = shard_file(last, 3);
    let bytes = std::fs::read(&shard).map_err(err)?;
    std::fs::write(&shard, &bytes[..bytes.len() / 2]).map_err(err)?;
    run(&cfg, &RunOptions { resume: true, stop_after: None })?;
    trees.push(("crash+resume".into(), tree_bytes(&cfg.output)?));

    let reference = &trees[0].1;
    let differing: Vec<&str> = trees[1..].iter().filter(|(_, t)| t != reference).map(|(n, _)| n.as_str()).collect();
    check(
        differing.is_empty() && docs_out > 0 && reference.len() > 2,
        format!(
            "{} input docs -> {docs_out}; {} output files compared across workers 1/4/16, stop+resume, \
             crash+resume; differing: {differing:?}",
            c.docs,
            reference.len()
        ),
    )
}

// 8
fn accounting(c: &Cascade) -> Outcome {
    let out = c.root.join("out-w1");
    let text = std::fs::read_to_string(out.join("report.json")).map_err(err)?;
    let report: MixtureReport = serde_json::from_str(&text).map_err(err)?;
    report.check().map_err(err)?;
    let input_docs = c.docs as u64;
    let final_docs = read_output(&out, 8)?.len() as u64;
    let mut problems = Vec::new();
    if report.input_docs != input_docs {
        problems.push(format!("report input {} vs {input_docs} on disk", report.input_docs));
    }
    if report.docs != final_docs {
        problems.push(format!("report output {} vs {final_docs} on disk", report.docs));
    }
    let stages = out.join("work").join("stages");
    for (k, s) in report.stages.iter().enumerate() {
        let reasons: u64 = s.drop_reasons.values().sum();
        if reasons != s.docs_dropped {
            problems.push(format!("{}: reasons sum {reasons} != dropped {}", s.stage_name, s.docs_dropped));
        }
        let dir = stages.join(format!("{:03}_{}", k + 1, s.stage_name));
        let on_disk = read_output(&dir, 8)?.len() as u64;
        if on_disk != s.docs_out {
            problems.push(format!("{}: {on_disk} docs on disk, report says {}", s.stage_name, s.docs_out));
        }
    }
    let dropped: u64 = report.stages.iter().map(|s| s.docs_dropped).sum();
    let born: u64 = report.stages.iter().map(|s| s.docs_born).sum();

    // a tampered report must be rejected
    let mut bad = report.clone();
    if let Some(s) = bad.stages.get_mut(1) {
        s.docs_dropped += 1;
    }
    let rejected = bad.check().is_err();
    check(
        problems.is_empty() && rejected,
        format!(
            "input {input_docs} + born {born} = dropped {dropped} + output {final_docs} across {} stages; \
             tampered report rejected: {rejected}{}",
            report.stages.len(),
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    )
}

// 9
fn haystack() -> Outcome {
    let texts: Vec<String> = generate_corpus(&SynthConfig { docs: 400, seed: 9 }).into_iter().map(|d| d.text).collect();
    let tok = train_bpe(texts.iter().map(String::as_str), &TokenizerConfig { vocab_size: 2000, ..Default::default() })
        .map_err(err)?;
    let corpus: Vec<Vec<u32>> = texts.iter().map(|t| tok.encode(t)).collect();
    let spec = NeedleSpec::default();
    let needle = tok.encode(&spec.needle);
    let (lengths, depths) = (default_lengths(), default_depths());
    let grid = haystack_grid(&corpus, &tok, &spec, &lengths, &depths, 9).map_err(err)?;
    let mut bad = Vec::new();
    for inst in &grid {
        let hits: Vec<usize> = inst
            .tokens
            .windows(needle.len())
            .enumerate()
            .filter(|(_, w)| *w == needle.as_slice())
            .map(|(i, _)| i)
            .collect();
        let want = (inst.depth * (inst.length - needle.len()) as f64).round() as i64;
        let ok = inst.tokens.len() == inst.length
            && hits.len() == 1
            && (hits[0] as i64 - want).abs() <= 1
            && needle_offset(inst.length, needle.len(), inst.depth) == inst.needle_offset;
        if !ok {
            bad.push(inst.instance_id.clone());
        }
    }
    let dir = temp()?;
    let write = |tag: &str| -> Result<(Vec<u8>, Vec<u8>), String> {
        let g = haystack_grid(&corpus, &tok, &spec, &lengths, &depths, 9).map_err(err)?;
        let (t, m) = (dir.path().join(format!("{tag}.tokens")), dir.path().join(format!("{tag}.jsonl")));
        write_grid(&g, &t, &m).map_err(err)?;
        Ok((std::fs::read(t).map_err(err)?, std::fs::read(m).map_err(err)?))
    };
    let identical = write("a")? == write("b")?;
    check(
        grid.len() == 100 && bad.is_empty() && identical,
        format!(
            "{} instances, {} misplaced or repeated needles; regeneration byte-identical: {identical}",
            grid.len(),
            bad.len()
        ),
    )
}

// 10
fn throughput() -> Outcome {
    let docs = generate_corpus(&SynthConfig { docs: 3000, seed: 10 });
    let h = bench_heuristics(&docs, 1, 2.0).map_err(err)?;
    let m = bench_minhash(&docs, 1, 2.0).map_err(err)?;
    check(
        h.meets_floor && m.meets_floor,
        format!(
            "heuristics {:.1} MB/s/worker (floor {HEURISTIC_FLOOR_MB_S}), MinHash {:.1} MB/s/worker (floor {MINHASH_FLOOR_MB_S})",
            h.mb_per_sec_per_worker, m.mb_per_sec_per_worker
        ),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut report = |name: &'static str, o: Outcome| {
        match &o {
            Ok(d) => println!("PASS  {name}: {d}"),
            Err(d) => println!("FAIL  {name}: {d}"),
        }
        results.push((name, o));
    };
    report("1 dedup correctness", dedup_correctness());
    report("2 minhash fidelity", minhash_fidelity());
    report("3 repetition oracle", repetition_exact());
    report("4 kneser-ney lm", kn_lm());
    report("5 tokenizer", tokenizer_props());
    report("6 quality classifier", quality_auc());
    match cascade(10_000) {
        Ok(c) => {
            report("7 pipeline determinism", pipeline_determinism(&c));
            report("8 removal accounting", accounting(&c));
        }
        Err(e) => {
            report("7 pipeline determinism", Err(e.clone()));
            report("8 removal accounting", Err(e));
        }
    }
    report("9 haystack", haystack());
    report("10 throughput", throughput());
    let failed = results.iter().filter(|(_, o)| o.is_err()).count();
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
