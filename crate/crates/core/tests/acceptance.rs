//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p typoscope --test acceptance`.

mod common;

use std::collections::{BTreeSet, HashSet};
use std::net::IpAddr;
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use hickory_proto::rr::{Name, RData, RecordType};
use hickory_proto::serialize::txt::Parser;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use typoscope::classify::TargetIndex;
use typoscope::damerau_levenshtein;
use typoscope::defense::{
    export_blacklist, export_domains, rank_and_plan, BlacklistFormat, ModelWeights,
};
use typoscope::domain::{parse_domain_list, Domain};
use typoscope::generation::{
    generate_all, generate_model, Alphabet, GenerationConfig, GenerationError, Scheme, TypoModel,
};
use typoscope::probe::{active_fraction, probe_batch_with_clock, Resolver};
use typoscope::resources::ConfusableMap;
use typoscope::traffic::{
    extract_pairs, flag_typos, Ranking, DEFAULT_MIN_SUPPORT, DEFAULT_THRESHOLD, DEFAULT_WINDOW_SECS,
};

use common::{
    all_strings, corpus, dom, edit_graph, event, ldh_label, ldh_name, planted_log, random_label,
};

type Check = fn() -> Result<String, String>;

struct Criterion {
    id: usize,
    title: &'static str,
    limit: Option<Duration>,
    check: Check,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            title: "keyboard-typo examples for www.example.com",
            limit: Some(Duration::from_secs(1)),
            check: examples,
        },
        Criterion {
            id: 2,
            title: "closed-form counts match enumeration",
            limit: Some(Duration::from_secs(10)),
            check: cardinality,
        },
        Criterion {
            id: 3,
            title: "missing-dot over 10,000 www domains",
            limit: Some(Duration::from_secs(5)),
            check: missing_dot_scale,
        },
        Criterion {
            id: 4,
            title: "Damerau-Levenshtein equals edit-graph BFS",
            limit: Some(Duration::from_secs(60)),
            check: metric,
        },
        Criterion {
            id: 5,
            title: "distance contracts over the corpus",
            limit: None,
            check: distance_contracts,
        },
        Criterion {
            id: 6,
            title: "classification round trip",
            limit: Some(Duration::from_secs(60)),
            check: round_trip,
        },
        Criterion {
            id: 7,
            title: "bitsquat one-bit LDH outputs",
            limit: None,
            check: bitsquat_validity,
        },
        Criterion {
            id: 8,
            title: "detector recovers planted rates",
            limit: Some(Duration::from_secs(10)),
            check: planted_rates,
        },
        Criterion {
            id: 9,
            title: "detector window and popularity rules",
            limit: None,
            check: detector_rules,
        },
        Criterion {
            id: 10,
            title: "probe concurrency bound and active fraction",
            limit: None,
            check: probe_bounds,
        },
        Criterion {
            id: 11,
            title: "planner prefix and scaling invariance",
            limit: None,
            check: planner,
        },
        Criterion {
            id: 12,
            title: "blacklist export formats",
            limit: None,
            check: blacklist,
        },
    ];

    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.check)();
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(limit)) if elapsed > limit => {
                Err(format!("took {elapsed:.2?}, limit {limit:?}"))
            }
            (other, _) => other,
        };
        match outcome {
            Ok(detail) => println!("PASS [{}] {} ({detail}; {elapsed:.2?})", c.id, c.title),
            Err(reason) => {
                failed += 1;
                println!("FAIL [{}] {}: {reason}", c.id, c.title);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rendered_set(
    d: &Domain,
    model: TypoModel,
    config: &GenerationConfig,
) -> Result<HashSet<String>, String> {
    let out = generate_model(d, model, config).map_err(|e| e.to_string())?;
    Ok(out.candidates.iter().map(|c| c.domain.render()).collect())
}

fn examples() -> Result<String, String> {
    let d = dom("www.example.com");
    let config = GenerationConfig::default();
    let expected = [
        (TypoModel::MissingDot, "wwwexample.com"),
        (TypoModel::Omission, "www.exmple.com"),
        (TypoModel::Permutation, "www.examlpe.com"),
        (TypoModel::Substitution, "www.ezample.com"),
        (TypoModel::Duplication, "www.exaample.com"),
    ];
    for (model, name) in expected {
        let out = rendered_set(&d, model, &config)?;
        ensure(out.contains(name), || format!("{model} lacks {name}"))?;
    }
    Ok("5 of 5 present".to_string())
}

/// Candidate names reachable by one edit, built straight from the
/// definitions and filtered by the independent LDH check.
fn oracle(name: &[u8], model: TypoModel, alphabet: &[u8]) -> (usize, BTreeSet<Vec<u8>>) {
    let n = name.len();
    let mut raw = Vec::new();
    match model {
        TypoModel::Omission => {
            for i in 0..n {
                let mut t = name.to_vec();
                t.remove(i);
                raw.push(t);
            }
        }
        TypoModel::Permutation => {
            for i in 0..n.saturating_sub(1) {
                let mut t = name.to_vec();
                t.swap(i, i + 1);
                raw.push(t);
            }
        }
        TypoModel::Duplication => {
            for i in 0..n {
                let mut t = name.to_vec();
                t.insert(i, name[i]);
                raw.push(t);
            }
        }
        TypoModel::ModInplace => {
            for i in 0..n {
                for &c in alphabet.iter().filter(|&&c| c != name[i]) {
                    let mut t = name.to_vec();
                    t[i] = c;
                    raw.push(t);
                }
            }
        }
        TypoModel::ModInflate => {
            for i in 0..=n {
                for &c in alphabet {
                    let mut t = name.to_vec();
                    t.insert(i, c);
                    raw.push(t);
                }
            }
        }
        _ => unreachable!(),
    }
    let count = raw.len();
    let kept = raw
        .into_iter()
        .filter(|t| t != name && ldh_label(t))
        .collect();
    (count, kept)
}

fn cardinality() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let config = GenerationConfig::default();
    let sigma = config.alphabet.bytes().to_vec();
    let models = [
        TypoModel::Omission,
        TypoModel::Permutation,
        TypoModel::Duplication,
        TypoModel::ModInplace,
        TypoModel::ModInflate,
    ];
    let mut checked = 0;
    for _ in 0..1000 {
        let len = rng.gen_range(1..=6);
        let name = random_label(&mut rng, len);
        let d = dom(&format!("{name}.com"));
        let n = len;
        for model in models {
            let closed_form = match model {
                TypoModel::Omission => n,
                TypoModel::Permutation => n - 1,
                TypoModel::Duplication => n,
                TypoModel::ModInplace => n * (sigma.len() - 1),
                TypoModel::ModInflate => (n + 1) * sigma.len(),
                _ => unreachable!(),
            };
            let out = match generate_model(&d, model, &config) {
                Err(GenerationError::NameTooShort { .. })
                    if model == TypoModel::Omission && n < 2 =>
                {
                    continue
                }
                Err(e) => return Err(format!("{d} {model}: {e}")),
                Ok(out) => out,
            };
            let (oracle_raw, oracle_set) = oracle(name.as_bytes(), model, &sigma);
            ensure(oracle_raw == closed_form, || {
                format!("{d} {model}: oracle raw {oracle_raw} != {closed_form}")
            })?;
            let r = &out.report;
            ensure(r.raw == closed_form, || {
                format!("{d} {model}: raw {} != {closed_form}", r.raw)
            })?;
            ensure(
                r.raw == r.identical + r.invalid + r.shortcut + r.duplicate + r.emitted,
                || format!("{d} {model}: report does not partition {r:?}"),
            )?;
            let got: BTreeSet<Vec<u8>> = out
                .candidates
                .iter()
                .map(|c| c.domain.name().into_bytes())
                .collect();
            ensure(got.len() == out.candidates.len(), || {
                format!("{d} {model}: duplicate output")
            })?;
            ensure(got == oracle_set, || {
                format!("{d} {model}: output differs from enumeration")
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} name/model runs, 0 mismatches"))
}

fn missing_dot_scale() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut names = BTreeSet::new();
    while names.len() < 10_000 {
        let len = rng.gen_range(3..=12);
        names.insert(random_label(&mut rng, len));
    }
    let config = GenerationConfig::default();
    let mut total = 0;
    let mut distinct = HashSet::new();
    for name in &names {
        let d = dom(&format!("www.{name}.com"));
        let out = generate_model(&d, TypoModel::MissingDot, &config).map_err(|e| e.to_string())?;
        total += out.candidates.len();
        for c in out.candidates {
            distinct.insert(c.domain.render());
        }
    }
    ensure(total == 10_000 && distinct.len() == 10_000, || {
        format!("{total} candidates, {} distinct", distinct.len())
    })?;
    Ok("10000 candidates".to_string())
}

fn metric() -> Result<String, String> {
    let strings = all_strings(b"abc", 4);
    let mut pairs = 0;
    for a in &strings {
        // One spare symbol lets paths pass through characters absent from both ends.
        let reach = edit_graph(a, b"abcd", 6, 4);
        for b in &strings {
            let want = reach[b];
            let got = damerau_levenshtein(
                std::str::from_utf8(a).unwrap(),
                std::str::from_utf8(b).unwrap(),
            )
            .value();
            ensure(got == want, || {
                format!(
                    "{:?} vs {:?}: {got} != {want}",
                    String::from_utf8_lossy(a),
                    String::from_utf8_lossy(b)
                )
            })?;
            pairs += 1;
        }
    }
    ensure(damerau_levenshtein("ca", "abc").value() == 2, || {
        "(ca, abc) != 2".to_string()
    })?;
    Ok(format!("{pairs} pairs"))
}

fn kmod_config() -> GenerationConfig {
    let mut config = GenerationConfig::default().with_models(TypoModel::all_kmod());
    config.alphabet = Alphabet::new("ao1-").unwrap();
    config
}

fn single_config() -> GenerationConfig {
    GenerationConfig::default()
}

fn distance_contracts() -> Result<String, String> {
    let mut single = 0;
    let mut multi = 0;
    let mut kmod = 0;
    let one_edit = [
        TypoModel::MissingDot,
        TypoModel::Omission,
        TypoModel::Permutation,
        TypoModel::Substitution,
        TypoModel::Duplication,
        TypoModel::ModInplace,
        TypoModel::ModDeflate,
        TypoModel::ModInflate,
        TypoModel::Bitsquat,
    ];
    for d in corpus() {
        let config = single_config();
        for model in one_edit {
            let out = match generate_model(&d, model, &config) {
                Err(GenerationError::NameTooShort { .. }) => continue,
                other => other.map_err(|e| e.to_string())?,
            };
            for c in &out.candidates {
                // Without a leading www the dot that goes missing is the one
                // after the www the typist meant to enter.
                let reference = if model == TypoModel::MissingDot && !d.original_had_www() {
                    format!("www.{d}")
                } else {
                    d.render()
                };
                let dist = damerau_levenshtein(&c.domain.render(), &reference).value();
                ensure(dist == 1, || {
                    format!("{model} {} from {reference} at {dist}", c.domain)
                })?;
                single += 1;
            }
        }
        for (src, dst) in config.confusables.rules() {
            let mut one_rule = config.clone();
            one_rule.confusables =
                ConfusableMap::from_rules([(src.as_str(), dst.as_str())]).unwrap();
            let out =
                generate_model(&d, TypoModel::Homograph, &one_rule).map_err(|e| e.to_string())?;
            for c in &out.candidates {
                let dist = damerau_levenshtein(&c.domain.render(), &d.render()).value();
                if src.len() == 1 && dst.len() == 1 {
                    ensure(dist == 1, || {
                        format!("{src}->{dst} {} from {d} at {dist}", c.domain)
                    })?;
                    single += 1;
                } else {
                    ensure(dist >= 1, || {
                        format!("{src}->{dst} {} equals {d}", c.domain)
                    })?;
                    multi += 1;
                }
            }
        }
        let config = kmod_config();
        for &model in &config.models {
            let TypoModel::KMod { k, .. } = model else {
                unreachable!()
            };
            let out = generate_model(&d, model, &config).map_err(|e| e.to_string())?;
            for c in &out.candidates {
                let dist = damerau_levenshtein(&c.domain.render(), &d.render()).value();
                ensure((2..=k as usize).contains(&dist), || {
                    format!("{model} {} from {d} at {dist}", c.domain)
                })?;
                kmod += 1;
            }
        }
    }
    // k = 2 again with the full alphabet on a slice of the corpus.
    let mut full = GenerationConfig::default()
        .with_models(TypoModel::all_kmod().filter(|m| matches!(m, TypoModel::KMod { k: 2, .. })));
    full.alphabet = Alphabet::default();
    for d in corpus().iter().take(10) {
        for &model in &full.models {
            let out = generate_model(d, model, &full).map_err(|e| e.to_string())?;
            for c in &out.candidates {
                let dist = damerau_levenshtein(&c.domain.render(), &d.render()).value();
                ensure(dist == 2, || {
                    format!("{model} {} from {d} at {dist}", c.domain)
                })?;
                kmod += 1;
            }
        }
    }
    Ok(format!(
        "{single} one-edit, {multi} multi-character homograph, {kmod} k-mod candidates"
    ))
}

fn round_trip() -> Result<String, String> {
    let targets = corpus();
    let mut checked = 0;
    for config in [single_config(), kmod_config()] {
        for target in &targets {
            let index = TargetIndex::build(target, &config);
            for &model in &config.models {
                let out = match generate_model(target, model, &config) {
                    Err(GenerationError::NameTooShort { .. }) => continue,
                    other => other.map_err(|e| e.to_string())?,
                };
                for c in &out.candidates {
                    let a = index.attribute(&c.domain, &config);
                    ensure(a.models.contains(&model), || {
                        format!(
                            "{} from {target} by {model} attributed to {:?}",
                            c.domain, a.models
                        )
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} candidates attributed"))
}

fn bitsquat_validity() -> Result<String, String> {
    let config = GenerationConfig::default();
    let mut checked = 0;
    for d in corpus() {
        let out = generate_model(&d, TypoModel::Bitsquat, &config).map_err(|e| e.to_string())?;
        let source = d.name().into_bytes();
        for c in &out.candidates {
            let name = c.domain.name().into_bytes();
            ensure(
                c.domain.tld() == d.tld() && name.len() == source.len(),
                || format!("{} vs {d}", c.domain),
            )?;
            let bits: u32 = name
                .iter()
                .zip(&source)
                .map(|(a, b)| (a ^ b).count_ones())
                .sum();
            ensure(bits == 1, || {
                format!("{} differs from {d} in {bits} bits", c.domain)
            })?;
            ensure(ldh_name(&name), || format!("{} is not LDH", c.domain))?;
            checked += 1;
        }
    }
    let ms = rendered_set(&dom("microsoft.com"), TypoModel::Bitsquat, &config)?;
    ensure(ms.contains("mic2osoft.com"), || {
        "mic2osoft.com missing".to_string()
    })?;
    Ok(format!("{checked} outputs"))
}

fn planted_rates() -> Result<String, String> {
    let ranking: Ranking = [(dom("google.com"), 1), (dom("nfl.com"), 50)]
        .into_iter()
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(8);

    let (log, visits, planted) = planted_log(&mut rng, "gooogle.com", "google.com", 0.90, 10_000);
    ensure(log.len() == 10_000, || {
        format!("log has {} visits", log.len())
    })?;
    let stats = extract_pairs(&log, DEFAULT_WINDOW_SECS, &ranking);
    let stat = stats
        .iter()
        .find(|s| s.d1 == dom("gooogle.com") && s.d2 == dom("google.com"))
        .ok_or("planted pair not found")?;
    let measured = stat.probability();
    let truth = planted as f64 / visits as f64;
    ensure(measured == truth, || {
        format!("measured {measured}, planted {truth}")
    })?;
    ensure((measured - 0.90).abs() <= 0.01, || {
        format!("measured {measured}")
    })?;
    let flags = flag_typos(&stats, DEFAULT_THRESHOLD, DEFAULT_MIN_SUPPORT);
    ensure(flags.iter().any(|v| v.typo == dom("gooogle.com")), || {
        "p = 0.90 not flagged".to_string()
    })?;

    let (log, _, _) = planted_log(&mut rng, "nhl.com", "nfl.com", 0.0008, 10_000);
    let stats = extract_pairs(&log, DEFAULT_WINDOW_SECS, &ranking);
    let low = stats.iter().map(|s| s.probability()).fold(0.0, f64::max);
    let flags = flag_typos(&stats, DEFAULT_THRESHOLD, DEFAULT_MIN_SUPPORT);
    ensure(flags.is_empty(), || {
        format!("p = 0.0008 flagged: {flags:?}")
    })?;
    Ok(format!("measured {measured:.4} and {low:.4}"))
}

fn detector_rules() -> Result<String, String> {
    let ranking: Ranking = [(dom("google.com"), 1), (dom("gogle.com"), 900)]
        .into_iter()
        .collect();
    let late = [event(0.0, "u", "gogle.com"), event(34.0, "u", "google.com")];
    let n = extract_pairs(&late, DEFAULT_WINDOW_SECS, &ranking).len();
    ensure(n == 0, || format!("34 s gap counted {n} pairs"))?;
    let inside = [event(0.0, "u", "gogle.com"), event(33.0, "u", "google.com")];
    let n = extract_pairs(&inside, DEFAULT_WINDOW_SECS, &ranking).len();
    ensure(n == 1, || format!("33 s gap counted {n} pairs"))?;
    let downhill = [event(0.0, "u", "google.com"), event(5.0, "u", "gogle.com")];
    let n = extract_pairs(&downhill, DEFAULT_WINDOW_SECS, &ranking).len();
    ensure(n == 0, || {
        format!("less popular follow-up counted {n} pairs")
    })?;
    Ok("0 pairs on excluded fixtures".to_string())
}

struct Instrumented {
    live: HashSet<Domain>,
    current: AtomicUsize,
    peak: AtomicUsize,
}

impl Resolver for Instrumented {
    fn resolve(&self, name: &Domain) -> Result<Vec<IpAddr>, String> {
        let now = self.current.fetch_add(1, Ordering::SeqCst) + 1;
        self.peak.fetch_max(now, Ordering::SeqCst);
        std::thread::sleep(Duration::from_micros(200));
        self.current.fetch_sub(1, Ordering::SeqCst);
        Ok(if self.live.contains(name) {
            vec![IpAddr::from([192, 0, 2, 1])]
        } else {
            Vec::new()
        })
    }
}

fn probe_bounds() -> Result<String, String> {
    let names: Vec<Domain> = (0..10_000)
        .map(|i| dom(&format!("wwwsite{i}.com")))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut shuffled = names.clone();
    shuffled.shuffle(&mut rng);
    let resolver = Instrumented {
        live: shuffled.into_iter().take(5_094).collect(),
        current: AtomicUsize::new(0),
        peak: AtomicUsize::new(0),
    };
    let max_in_flight = 16;
    let results = probe_batch_with_clock(&names, &resolver, max_in_flight, &|| 0.0);
    let peak = resolver.peak.load(Ordering::SeqCst);
    ensure(peak <= max_in_flight, || {
        format!("peak {peak} > {max_in_flight}")
    })?;
    let fraction = active_fraction(&results).map_err(|e| e.to_string())?;
    ensure(fraction == 0.5094, || format!("active fraction {fraction}"))?;
    Ok(format!("peak {peak}, fraction {fraction}"))
}

fn planner() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let targets = corpus();
    let config =
        GenerationConfig::default().with_models(TypoModel::SINGLE_EDIT.into_iter().chain([
            TypoModel::KMod {
                k: 2,
                scheme: Scheme::Deflate,
            },
        ]));
    let pool: Vec<_> = targets
        .iter()
        .take(20)
        .map(|t| (t.clone(), generate_all(t, &config).unwrap().0))
        .collect();
    for trial in 0..1000 {
        let (target, cands) = &pool[rng.gen_range(0..pool.len())];
        let weights = loop {
            let pairs: Vec<(TypoModel, f64)> = config
                .models
                .iter()
                .map(|&m| {
                    (
                        m,
                        if rng.gen_bool(0.2) {
                            0.0
                        } else {
                            rng.gen_range(0.0..10.0)
                        },
                    )
                })
                .collect();
            if let Ok(w) = ModelWeights::from_pairs(pairs) {
                break w;
            }
        };
        let b1 = rng.gen_range(0..=cands.len() + 5);
        let b2 = rng.gen_range(b1..=cands.len() + 5);
        let small = rank_and_plan(target, cands, &weights, b1);
        let large = rank_and_plan(target, cands, &weights, b2);
        ensure(small.picks.len() == b1.min(cands.len()), || {
            format!("trial {trial}: wrong plan size")
        })?;
        ensure(large.picks[..small.picks.len()] == small.picks[..], || {
            format!("trial {trial}: budget {b1} is not a prefix of budget {b2}")
        })?;
        let factor = rng.gen_range(0.01..100.0);
        let scaled = rank_and_plan(target, cands, &weights.scaled(factor), b2);
        let order = |p: &typoscope::defense::RegistrationPlan| -> Vec<Domain> {
            p.picks.iter().map(|p| p.candidate.domain.clone()).collect()
        };
        ensure(order(&scaled) == order(&large), || {
            format!("trial {trial}: scaling by {factor} changed the plan")
        })?;
    }
    Ok("1000 trials, 0 violations".to_string())
}

fn blacklist() -> Result<String, String> {
    let (cands, _) = generate_all(&dom("www.example.com"), &GenerationConfig::default())
        .map_err(|e| e.to_string())?;
    let cands = &cands[..100];
    let zone = export_blacklist(cands, BlacklistFormat::Rpz);
    let origin = Name::from_str("rpz.example.").unwrap();
    let (_, records) = Parser::new(zone.as_str(), None, Some(origin.clone()))
        .parse()
        .map_err(|e| format!("zone parser: {e}"))?;
    let mut names = BTreeSet::new();
    let mut soa = false;
    for (key, set) in &records {
        match key.record_type {
            RecordType::SOA => soa = true,
            RecordType::NS => {}
            RecordType::CNAME => {
                for record in set.records_without_rrsigs() {
                    ensure(
                        matches!(record.data(), Some(RData::CNAME(t)) if t.0.is_root()),
                        || format!("{} does not point at the root", key.name()),
                    )?;
                }
                let owner = key.name().to_string();
                let relative = owner
                    .strip_suffix(".rpz.example.")
                    .ok_or_else(|| format!("{owner} outside zone"))?;
                names.insert(relative.to_string());
            }
            other => return Err(format!("unexpected {other} record")),
        }
    }
    ensure(soa, || "no SOA record".to_string())?;
    let want: BTreeSet<String> = cands.iter().map(|c| c.domain.render()).collect();
    ensure(names == want, || {
        format!("{} names parsed, {} exported", names.len(), want.len())
    })?;

    let list =
        parse_domain_list(include_str!("data/blocklist.txt"), None).map_err(|e| e.to_string())?;
    let hosts = export_domains(&list, BlacklistFormat::Hosts);
    ensure(hosts == include_str!("data/blocklist.hosts"), || {
        "hosts output differs from golden file".to_string()
    })?;
    Ok(format!(
        "{} rpz names, {} hosts lines",
        names.len(),
        hosts.lines().count()
    ))
}
