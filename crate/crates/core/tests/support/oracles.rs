//! Deliberately naive reimplementations of the syntactic metrics and the
//! hand-built corpus of 25 comment pairs they are checked on.

use helpcom_core::metrics::{TokenizedText, bleu4_smoothed, cider, meteor, rouge_l, tokenize};
use rust_stemmers::{Algorithm, Stemmer};
use serde::Deserialize;

pub const TOL: f64 = 1e-9;

#[derive(Deserialize)]
struct Pair {
    candidate: String,
    reference: String,
}

pub fn corpus() -> Vec<(TokenizedText, TokenizedText)> {
    let path = super::core_dir().join("tests/fixtures/metric_corpus.json");
    let pairs: Vec<Pair> = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(pairs.len(), 25);
    pairs
        .into_iter()
        .map(|p| (tokenize(&p.candidate), tokenize(&p.reference)))
        .collect()
}

pub fn grams(tokens: &[String], n: usize) -> Vec<Vec<String>> {
    if tokens.len() < n {
        return Vec::new();
    }
    (0..=tokens.len() - n)
        .map(|i| tokens[i..i + n].to_vec())
        .collect()
}

pub fn occurrences(list: &[Vec<String>], g: &[String]) -> usize {
    list.iter().filter(|x| x.as_slice() == g).count()
}

pub fn oracle_bleu(c: &[String], r: &[String]) -> f64 {
    if c.is_empty() {
        return 0.0;
    }
    let mut product = 1.0;
    let mut k = 0;
    for n in 1..=4 {
        let cg = grams(c, n);
        if cg.is_empty() {
            continue;
        }
        let rg = grams(r, n);
        let mut distinct: Vec<&Vec<String>> = Vec::new();
        for g in &cg {
            if !distinct.contains(&g) {
                distinct.push(g);
            }
        }
        let clipped: usize = distinct
            .iter()
            .map(|g| occurrences(&cg, g).min(occurrences(&rg, g)))
            .sum();
        let p = if clipped == 0 {
            if n == 1 {
                return 0.0;
            }
            1.0 / (cg.len() as f64 + 1.0)
        } else {
            clipped as f64 / cg.len() as f64
        };
        product *= p;
        k += 1;
    }
    let bp = if c.len() >= r.len() {
        1.0
    } else {
        (1.0 - r.len() as f64 / c.len() as f64).exp()
    };
    bp * product.powf(1.0 / k as f64)
}

pub fn is_subsequence(sub: &[&String], of: &[String]) -> bool {
    let mut it = of.iter();
    sub.iter().all(|s| it.any(|x| x == *s))
}

/// LCS by enumerating every subsequence of the candidate.
pub fn oracle_lcs(c: &[String], r: &[String]) -> usize {
    assert!(c.len() <= 16);
    let mut best = 0;
    for mask in 0u32..(1 << c.len()) {
        let sub: Vec<&String> = (0..c.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| &c[i])
            .collect();
        if sub.len() > best && is_subsequence(&sub, r) {
            best = sub.len();
        }
    }
    best
}

pub fn oracle_rouge(c: &[String], r: &[String]) -> f64 {
    let l = oracle_lcs(c, r) as f64;
    if l == 0.0 {
        return 0.0;
    }
    let p = l / c.len() as f64;
    let rec = l / r.len() as f64;
    2.0 * p * rec / (p + rec)
}

pub fn oracle_meteor(c: &[String], r: &[String]) -> f64 {
    let stemmer = Stemmer::create(Algorithm::English);
    let mut link: Vec<Option<usize>> = vec![None; c.len()];
    let mut taken = vec![false; r.len()];
    for stage in 0..2 {
        let key = |t: &String| {
            if stage == 0 {
                t.clone()
            } else {
                stemmer.stem(t).to_string()
            }
        };
        for i in 0..c.len() {
            if link[i].is_some() {
                continue;
            }
            for j in 0..r.len() {
                if !taken[j] && key(&c[i]) == key(&r[j]) {
                    link[i] = Some(j);
                    taken[j] = true;
                    break;
                }
            }
        }
    }
    let m = link.iter().flatten().count();
    if m == 0 {
        return 0.0;
    }
    let mut chunks = 0;
    let mut prev: Option<(usize, usize)> = None;
    for (i, j) in link
        .iter()
        .enumerate()
        .filter_map(|(i, j)| j.map(|j| (i, j)))
    {
        match prev {
            Some((pi, pj)) if pi + 1 == i && pj + 1 == j => {}
            _ => chunks += 1,
        }
        prev = Some((i, j));
    }
    let p = m as f64 / c.len() as f64;
    let rec = m as f64 / r.len() as f64;
    let fmean = 10.0 * p * rec / (rec + 9.0 * p);
    let frag = chunks as f64 / m as f64;
    fmean * (1.0 - 0.5 * frag * frag * frag)
}

/// CIDEr with dense vectors over the full n-gram vocabulary of the corpus.
pub fn oracle_cider(pairs: &[(TokenizedText, TokenizedText)]) -> Vec<f64> {
    let n_refs = pairs.len() as f64;
    let mut out = vec![0.0; pairs.len()];
    for n in 1..=4 {
        let mut vocab: Vec<Vec<String>> = Vec::new();
        for (c, r) in pairs {
            for g in grams(&c.tokens, n).into_iter().chain(grams(&r.tokens, n)) {
                if !vocab.contains(&g) {
                    vocab.push(g);
                }
            }
        }
        let idf: Vec<f64> = vocab
            .iter()
            .map(|g| {
                let df = pairs
                    .iter()
                    .filter(|(_, r)| occurrences(&grams(&r.tokens, n), g) > 0)
                    .count();
                (n_refs / df.max(1) as f64).ln()
            })
            .collect();
        let vector = |t: &TokenizedText| -> Vec<f64> {
            let gs = grams(&t.tokens, n);
            vocab
                .iter()
                .zip(&idf)
                .map(|(g, w)| occurrences(&gs, g) as f64 * w)
                .collect()
        };
        for (k, (c, r)) in pairs.iter().enumerate() {
            let (a, b) = (vector(c), vector(r));
            let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
            let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            if na > 0.0 && nb > 0.0 {
                out[k] += dot / (na * nb);
            }
        }
    }
    out.into_iter().map(|s| s / 4.0 * 10.0).collect()
}

pub fn check_bleu_matches_oracle() {
    for (i, (c, r)) in corpus().iter().enumerate() {
        let got = bleu4_smoothed(c, r).unwrap();
        let want = oracle_bleu(&c.tokens, &r.tokens);
        assert!((got - want).abs() <= TOL, "pair {i}: {got} vs {want}");
    }
}

pub fn check_rouge_matches_oracle() {
    for (i, (c, r)) in corpus().iter().enumerate() {
        let got = rouge_l(c, r).unwrap();
        let want = oracle_rouge(&c.tokens, &r.tokens);
        assert!((got - want).abs() <= TOL, "pair {i}: {got} vs {want}");
    }
}

pub fn check_meteor_matches_oracle() {
    for (i, (c, r)) in corpus().iter().enumerate() {
        let got = meteor(c, r).unwrap();
        let want = oracle_meteor(&c.tokens, &r.tokens);
        assert!((got - want).abs() <= TOL, "pair {i}: {got} vs {want}");
    }
}

pub fn check_cider_matches_oracle() {
    let pairs = corpus();
    let (cands, refs): (Vec<_>, Vec<_>) = pairs.iter().cloned().unzip();
    let got = cider(&cands, &refs).unwrap();
    let want = oracle_cider(&pairs);
    for i in 0..pairs.len() {
        assert!(
            (got[i] - want[i]).abs() <= TOL,
            "pair {i}: {} vs {}",
            got[i],
            want[i]
        );
    }
}

pub fn check_corpus_covers_identity_and_disjoint_cases() {
    let pairs = corpus();
    let (c, r) = &pairs[0];
    assert!((bleu4_smoothed(c, r).unwrap() - 1.0).abs() <= TOL);
    assert_eq!(rouge_l(c, r).unwrap(), 1.0);
    let (c, r) = &pairs[9];
    assert_eq!(bleu4_smoothed(c, r).unwrap(), 0.0);
    assert_eq!(rouge_l(c, r).unwrap(), 0.0);
    assert_eq!(meteor(c, r).unwrap(), 0.0);
}

pub fn check_contract_examples() {
    let got = bleu4_smoothed(&tokenize("the cat sat"), &tokenize("the cat sat down")).unwrap();
    assert!((got - 0.7165).abs() < 1e-4);
    assert_eq!(
        bleu4_smoothed(&tokenize(""), &tokenize("any reference")).unwrap(),
        0.0
    );
    assert!((rouge_l(&tokenize("the cat"), &tokenize("the cat sat")).unwrap() - 0.8).abs() <= TOL);
    assert!((meteor(&tokenize("close"), &tokenize("close")).unwrap() - 0.5).abs() <= TOL);
    let ten = tokenize("a b c d e f g h i j");
    assert!((meteor(&ten, &ten).unwrap() - 0.9995).abs() <= TOL);
    for f in [bleu4_smoothed, rouge_l, meteor] {
        assert!(f(&tokenize("x"), &tokenize("")).is_err());
    }
}
