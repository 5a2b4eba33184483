//! Acceptance harness: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report is always printed. The
//! process exits non-zero when any criterion fails.

mod common;

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use resmin::bounds::SmusLimits;
use resmin::cnf::{Clause, Formula};
use resmin::dimacs::parse_dimacs_clauses;
use resmin::generators::{generate_mus_variant, ordering, parity, php, random3cnf};
use resmin::layers::canonical_layer_list;
use resmin::lrat::{expand_to_resolution, measure, parse_lrat};
use resmin::proof::{verify_proof, Premises, Proof, ProofStep};
use resmin::sat::{correcting_clauses, solve, SolveResult};
use resmin::search::{minimize, minimize_with_progress, root_bound, SearchConfig, Seeding, Termination};

use common::{shortest_proof_length, to_formula, unsat_corpus, RawClause};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn optimal_length(f: &Formula, cfg: &SearchConfig) -> (usize, bool) {
    let out = minimize(f, cfg).expect("unsatisfiable input");
    assert!(verify_proof(f, &out.incumbent).is_valid());
    (out.incumbent_length, out.optimal)
}

fn is_mus(f: &Formula) -> bool {
    let refs: Vec<&Clause> = f.iter().collect();
    correcting_clauses(&refs, u64::MAX).len() == f.len()
}

/// The small random corpus shared by criteria 5 and 7.
fn oracle_corpus() -> Vec<Vec<RawClause>> {
    let mut corpus = unsat_corpus(11, 30, 3, 8);
    corpus.extend(unsat_corpus(12, 30, 4, 8));
    corpus.extend(unsat_corpus(13, 20, 5, 8));
    corpus
}

fn criterion_1() -> Verdict {
    let f = Formula::from_dimacs(&[&[1, -2], &[-1], &[2]]);
    let start = Instant::now();
    let (len, optimal) = optimal_length(&f, &SearchConfig::optimal());
    let t = start.elapsed();
    verdict(
        len == 5 && optimal && t < Duration::from_secs(1),
        format!("length={len} optimal={optimal} time={:.3}s", t.as_secs_f64()),
    )
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let (l1, o1) = optimal_length(&php(1), &SearchConfig::optimal());
    let (l2, o2) = optimal_length(&php(2), &SearchConfig::optimal());
    let t = start.elapsed();
    verdict(
        l1 == 5 && o1 && l2 == 19 && o2 && t <= Duration::from_secs(600),
        format!("php(1)={l1} optimal={o1} php(2)={l2} optimal={o2} time={:.1}s", t.as_secs_f64()),
    )
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let (len, optimal) = optimal_length(&parity(1), &SearchConfig::optimal());
    let t = start.elapsed();
    verdict(
        len == 11 && optimal && t <= Duration::from_secs(600),
        format!("parity(1)={len} optimal={optimal} time={:.1}s", t.as_secs_f64()),
    )
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let (l1, o1) = optimal_length(&ordering(1), &SearchConfig::optimal());
    let (l2, o2) = optimal_length(&ordering(2), &SearchConfig::optimal());
    let variant = generate_mus_variant(&ordering(2), u64::MAX).unwrap();
    let mus_ok = variant.exact && is_mus(&variant.formula);
    let (l3, o3) = optimal_length(&variant.formula, &SearchConfig { mus: mus_ok, ..SearchConfig::optimal() });
    let t = start.elapsed();
    verdict(
        l1 == 5 && o1 && l2 == 16 && o2 && mus_ok && l3 == 16 && o3 && t <= Duration::from_secs(600),
        format!(
            "ordering(1)={l1} optimal={o1} ordering(2)={l2} optimal={o2} mus-variant({} clauses)={l3} optimal={o3} time={:.1}s",
            variant.formula.len(),
            t.as_secs_f64()
        ),
    )
}

fn criterion_5(corpus: &[Vec<RawClause>], optima: &mut Vec<usize>) -> Verdict {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    for f in corpus {
        let expected = shortest_proof_length(f).expect("corpus is unsatisfiable");
        optima.push(expected);
        let formula = to_formula(f);
        let (got, optimal) = optimal_length(&formula, &SearchConfig::optimal());
        if got != expected || !optimal {
            mismatches.push(format!("{f:?}: oracle={expected} search={got} optimal={optimal}"));
        }
    }
    let t = start.elapsed();
    let mut detail = format!(
        "{} instances, {} mismatches, lengths {}..={}, time={:.1}s",
        corpus.len(),
        mismatches.len(),
        optima.iter().min().unwrap_or(&0),
        optima.iter().max().unwrap_or(&0),
        t.as_secs_f64()
    );
    if let Some(m) = mismatches.first() {
        let _ = write!(detail, "; first: {m}");
    }
    verdict(corpus.len() >= 50 && mismatches.is_empty() && t <= Duration::from_secs(1800), detail)
}

/// A random topological reordering of the proof steps.
fn shuffled_steps(proof: &Proof, rng: &mut rand_chacha::ChaCha8Rng) -> Proof {
    let steps = proof.steps();
    let mut placed = vec![usize::MAX; steps.len()];
    let mut order = Vec::with_capacity(steps.len());
    while order.len() < steps.len() {
        let ready: Vec<usize> = (0..steps.len())
            .filter(|&i| placed[i] == usize::MAX)
            .filter(|&i| match steps[i].premises {
                Premises::Axiom => true,
                Premises::Resolvent { left, right } => placed[left] != usize::MAX && placed[right] != usize::MAX,
            })
            .collect();
        let &pick = ready.choose(rng).unwrap();
        placed[pick] = order.len();
        order.push(pick);
    }
    let out: Vec<ProofStep> = order
        .iter()
        .map(|&i| {
            let premises = match steps[i].premises {
                Premises::Axiom => Premises::Axiom,
                Premises::Resolvent { left, right } => Premises::Resolvent { left: placed[left], right: placed[right] },
            };
            ProofStep { clause: steps[i].clause.clone(), premises }
        })
        .collect();
    // The empty clause stays last.
    let last = out.iter().position(|s| s.clause.is_empty()).unwrap();
    assert_eq!(last, out.len() - 1);
    Proof::from_steps(out)
}

fn criterion_6(corpus: &[Vec<RawClause>]) -> Verdict {
    let mut rng = common::rng(6);
    let mut formulas: Vec<Formula> = corpus.iter().map(|f| to_formula(f)).collect();
    formulas.extend([php(1), php(2), parity(1), ordering(1), ordering(2)]);
    let mut pairs = 0;
    let mut violations = Vec::new();
    for f in &formulas {
        let mut proofs = vec![minimize(f, &SearchConfig::optimal()).unwrap().incumbent];
        for seed in 0..3 {
            if let SolveResult::Unsat(p) = solve(f, seed) {
                proofs.push(p.trimmed());
            }
        }
        for proof in &proofs {
            let axioms = Formula::new(
                proof.steps().iter().filter(|s| s.premises == Premises::Axiom).map(|s| s.clause.clone()),
                f.num_vars(),
            );
            let reference = canonical_layer_list(&axioms, &proof.derived_clauses()).unwrap();
            if reference.validate(&axioms).is_err() {
                violations.push(format!("invalid layer list for {f:?}"));
            }
            for _ in 0..4 {
                let reordered = shuffled_steps(proof, &mut rng);
                pairs += 1;
                if !verify_proof(f, &reordered).is_valid() {
                    violations.push("reordering broke the proof".to_string());
                    continue;
                }
                let mut derived = reordered.derived_clauses();
                derived.shuffle(&mut rng);
                match canonical_layer_list(&axioms, &derived) {
                    Ok(l) if l == reference => {}
                    _ => violations.push(format!("layer list differs for {f:?}")),
                }
            }
        }
    }
    verdict(
        pairs >= 1000 && violations.is_empty(),
        format!("{pairs} (proof, permutation) pairs, {} violations", violations.len()),
    )
}

fn criterion_7(corpus: &[Vec<RawClause>], optima: &[usize]) -> Verdict {
    let limits = SmusLimits::default();
    let mut violations = Vec::new();
    for (f, &opt) in corpus.iter().zip(optima) {
        let b = root_bound(&to_formula(f), false, limits).unwrap();
        if b.value > opt {
            violations.push(format!("{f:?}: bound {} > optimum {opt}", b.value));
        }
    }
    let mut mus_formulas: Vec<Formula> = vec![php(1), php(2), parity(1), ordering(1)];
    mus_formulas.push(generate_mus_variant(&ordering(2), u64::MAX).unwrap().formula);
    for f in corpus {
        mus_formulas.push(generate_mus_variant(&to_formula(f), u64::MAX).unwrap().formula);
    }
    mus_formulas.retain(is_mus);
    for f in &mus_formulas {
        let need = 2 * f.len() - 1;
        for assume in [true, false] {
            let b = root_bound(f, assume, limits).unwrap();
            if b.value < need {
                violations.push(format!("{f:?}: MUS bound {} < {need}", b.value));
            }
        }
    }
    verdict(
        violations.is_empty(),
        format!(
            "{} oracle instances, {} MUS instances, {} violations{}",
            optima.len(),
            mus_formulas.len(),
            violations.len(),
            violations.first().map(|v| format!("; first: {v}")).unwrap_or_default()
        ),
    )
}

fn criterion_8() -> Verdict {
    let mut corpus = unsat_corpus(81, 40, 3, 6);
    corpus.extend(unsat_corpus(82, 40, 4, 6));
    let mut mismatches = 0;
    for f in &corpus {
        let formula = to_formula(f);
        let with = optimal_length(&formula, &SearchConfig::optimal());
        let without = optimal_length(&formula, &SearchConfig { frontier_branching: false, ..SearchConfig::optimal() });
        if with != without || !with.1 {
            mismatches += 1;
        }
    }
    verdict(mismatches == 0, format!("{} formulas with at most 6 clauses, {mismatches} mismatches", corpus.len()))
}

fn criterion_9() -> Verdict {
    let mut instances = vec![php(3), php(4), parity(2), parity(3), ordering(3), ordering(4)];
    let mut seed = 0;
    while instances.len() < 10 {
        let f = random3cnf(12, 70, seed).unwrap();
        seed += 1;
        if matches!(solve(&f, 0), SolveResult::Unsat(_)) {
            instances.push(f);
        }
    }
    let results: Vec<(bool, bool, usize)> = std::thread::scope(|s| {
        let handles: Vec<_> = instances
            .iter()
            .map(|f| {
                s.spawn(move || {
                    let cfg = SearchConfig { time_limit: Some(Duration::from_secs(5)), ..SearchConfig::optimal() };
                    let mut stream = Vec::new();
                    let out = minimize_with_progress(f, &cfg, &mut |p| stream.push(p.incumbent)).unwrap();
                    let monotone = stream.windows(2).all(|w| w[1] <= w[0]);
                    let final_ok = verify_proof(f, &out.incumbent).is_valid()
                        && stream.last() == Some(&out.incumbent_length);
                    (monotone, final_ok, usize::from(out.termination == Termination::TimeLimit))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let violations = results.iter().filter(|r| !r.0 || !r.1).count();
    let timed_out: usize = results.iter().map(|r| r.2).sum();
    verdict(
        violations == 0,
        format!("{} instances, {timed_out} hit the 5 s limit, {violations} violations", results.len()),
    )
}

/// LRAT text for a resolution proof: every resolvent becomes one line
/// whose hints are its two premises.
fn proof_to_lrat(proof: &Proof, num_axioms: usize, axiom_id: impl Fn(&Clause) -> usize) -> (String, Vec<usize>) {
    let mut ids = Vec::with_capacity(proof.len());
    let mut text = String::new();
    let mut next = num_axioms + 1;
    for step in proof.steps() {
        match step.premises {
            Premises::Axiom => ids.push(axiom_id(&step.clause)),
            Premises::Resolvent { left, right } => {
                let lits: Vec<String> = step.clause.lits().iter().map(|l| l.to_dimacs().to_string()).collect();
                let mut lits = lits.join(" ");
                if !lits.is_empty() {
                    lits.push(' ');
                }
                let _ = writeln!(text, "{next} {lits}0 {} {} 0", ids[left], ids[right]);
                ids.push(next);
                next += 1;
            }
        }
    }
    (text, ids)
}

fn criterion_10(corpus: &[Vec<RawClause>]) -> Verdict {
    let mut formulas: Vec<Formula> = corpus.iter().map(|f| to_formula(f)).collect();
    formulas.extend([php(2), php(3), parity(1), ordering(2)]);
    let mut certificates = 0;
    let mut violations = Vec::new();
    for f in &formulas {
        let dimacs = resmin::dimacs::write_dimacs(f, &[]);
        let cnf = parse_dimacs_clauses(dimacs.as_bytes()).unwrap();
        let axiom_id = |c: &Clause| f.iter().position(|d| d == c).unwrap() + 1;
        for seed in 0..3 {
            let SolveResult::Unsat(proof) = solve(f, seed) else { unreachable!() };
            let (text, _) = proof_to_lrat(&proof, f.len(), axiom_id);
            certificates += 1;
            let report = measure(&cnf, text.as_bytes()).unwrap();
            let ex = expand_to_resolution(&cnf, &parse_lrat(text.as_bytes()).unwrap(), true).unwrap();
            if report.dedup_length > report.raw_length {
                violations.push("dedup above raw".to_string());
            }
            if !verify_proof(f, &ex.proof).is_valid() {
                violations.push("expansion does not verify".to_string());
            }
        }
    }
    // Crafted: the same derivation written twice.
    let cnf = parse_dimacs_clauses(b"p cnf 2 3\n1 -2 0\n-1 -2 0\n2 0\n").unwrap();
    let cert = b"4 -2 0 1 2 0\n5 -2 0 1 2 0\n6 0 3 5 0\n";
    let ex = expand_to_resolution(&cnf, &parse_lrat(cert).unwrap(), false).unwrap();
    let crafted = measure(&cnf, cert).unwrap();
    let crafted_ok = ex.dedup_steps + 1 == ex.raw_steps && crafted.dedup_length + 1 == crafted.raw_length;
    certificates += 1;
    verdict(
        violations.is_empty() && crafted_ok,
        format!(
            "{certificates} certificates, {} violations, crafted raw={} dedup={}",
            violations.len(),
            crafted.raw_length,
            crafted.dedup_length
        ),
    )
}

fn criterion_11() -> Verdict {
    let mut instances = Vec::new();
    let mut seed = 0;
    while instances.len() < 10 {
        let f = random3cnf(6, 30, 1000 + seed).unwrap();
        seed += 1;
        if let SolveResult::Unsat(p) = solve(&f, 0) {
            instances.push((f, p.trimmed().len()));
        }
    }
    let results: Vec<(usize, usize)> = std::thread::scope(|s| {
        let handles: Vec<_> = instances
            .iter()
            .map(|(f, baseline)| {
                s.spawn(move || {
                    let cfg = SearchConfig {
                        time_limit: Some(Duration::from_secs(60)),
                        seeding: Seeding::Static(0),
                        ..SearchConfig::short()
                    };
                    let out = minimize(f, &cfg).unwrap();
                    assert!(verify_proof(f, &out.incumbent).is_valid());
                    (*baseline, out.incumbent_length)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let longer = results.iter().filter(|(b, l)| l > b).count();
    let shorter = results.iter().filter(|(b, l)| l < b).count();
    let pairs: Vec<String> = results.iter().map(|(b, l)| format!("{b}->{l}")).collect();
    verdict(
        longer == 0 && 2 * shorter >= results.len(),
        format!("{} instances, {shorter} strictly shorter, {longer} longer [{}]", results.len(), pairs.join(" ")),
    )
}

fn main() {
    // libtest flags such as --nocapture are accepted and ignored.
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let corpus = oracle_corpus();
    let mut optima = Vec::new();
    let mut failed = 0;
    let mut report = |n: u32, name: &str, run: &mut dyn FnMut() -> Verdict| {
        if filter.as_ref().is_some_and(|f| !name.contains(f.as_str()) && f != &n.to_string()) {
            return;
        }
        let start = Instant::now();
        let v = run();
        let status = if v.pass { "PASS" } else { "FAIL" };
        if !v.pass {
            failed += 1;
        }
        println!("criterion {n:>2} {status} {name}: {} [{:.1}s]", v.detail, start.elapsed().as_secs_f64());
    };
    report(1, "example-1 optimum", &mut criterion_1);
    report(2, "pigeonhole optima", &mut criterion_2);
    report(3, "parity optimum", &mut criterion_3);
    report(4, "ordering optima", &mut criterion_4);
    report(5, "oracle equivalence", &mut || criterion_5(&corpus, &mut optima));
    report(6, "layer-list uniqueness", &mut || criterion_6(&corpus));
    report(7, "bound soundness", &mut || {
        if optima.len() != corpus.len() {
            optima = corpus.iter().map(|f| shortest_proof_length(f).unwrap()).collect();
        }
        criterion_7(&corpus, &optima)
    });
    report(8, "frontier-restriction safety", &mut criterion_8);
    report(9, "anytime contract", &mut criterion_9);
    report(10, "lrat dedup properties", &mut || criterion_10(&corpus));
    report(11, "short mode beats the solver baseline", &mut criterion_11);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
