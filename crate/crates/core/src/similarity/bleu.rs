use std::collections::HashMap;

use crate::dsl::{Token, TokenKind};

const MAX_ORDER: usize = 4;
const SALIENT_WEIGHT: f64 = 5.0;

fn ngram_counts(tokens: &[&str], n: usize) -> HashMap<Vec<String>, usize> {
    let mut counts = HashMap::new();
    for w in tokens.windows(n) {
        *counts
            .entry(w.iter().map(|s| s.to_string()).collect())
            .or_insert(0) += 1;
    }
    counts
}

/// Clipped match count and candidate total for order `n`.
fn precision_parts(reference: &[&str], candidate: &[&str], n: usize) -> (f64, f64) {
    let r = ngram_counts(reference, n);
    let c = ngram_counts(candidate, n);
    let matched: usize = c
        .iter()
        .map(|(g, &k)| k.min(r.get(g).copied().unwrap_or(0)))
        .sum();
    (matched as f64, candidate.len().saturating_sub(n - 1) as f64)
}

fn token_weight(kind: TokenKind) -> f64 {
    match kind {
        TokenKind::Keyword | TokenKind::FunctionName => SALIENT_WEIGHT,
        _ => 1.0,
    }
}

/// Unigram precision with per-token weights taken from the candidate.
fn weighted_unigram(reference: &[Token], candidate: &[Token]) -> (f64, f64) {
    let mut budget: HashMap<&str, usize> = HashMap::new();
    for t in reference {
        *budget.entry(t.text.as_str()).or_insert(0) += 1;
    }
    let (mut matched, mut total) = (0.0, 0.0);
    for t in candidate {
        let w = token_weight(t.kind);
        total += w;
        if let Some(left) = budget.get_mut(t.text.as_str()) {
            if *left > 0 {
                *left -= 1;
                matched += w;
            }
        }
    }
    (matched, total)
}

fn combine(reference: &[Token], candidate: &[Token], unigram: (f64, f64)) -> f64 {
    if reference.is_empty() || candidate.is_empty() || unigram.0 == 0.0 {
        return 0.0;
    }
    let r: Vec<&str> = reference.iter().map(|t| t.text.as_str()).collect();
    let c: Vec<&str> = candidate.iter().map(|t| t.text.as_str()).collect();
    let mut log_sum = (unigram.0 / unigram.1).ln();
    for n in 2..=MAX_ORDER {
        let (matched, total) = precision_parts(&r, &c, n);
        let p = if matched == 0.0 {
            1.0 / (total + 1.0)
        } else {
            matched / total
        };
        log_sum += p.ln();
    }
    let (rl, cl) = (r.len() as f64, c.len() as f64);
    let brevity = if cl < rl { (1.0 - rl / cl).exp() } else { 1.0 };
    brevity * (log_sum / MAX_ORDER as f64).exp()
}

/// Sentence BLEU over lexeme texts: orders 1..=4, uniform weights, add-one
/// smoothing for empty higher orders and a brevity penalty. Empty input
/// scores 0.
pub fn bleu(reference: &[Token], candidate: &[Token]) -> f64 {
    let r: Vec<&str> = reference.iter().map(|t| t.text.as_str()).collect();
    let c: Vec<&str> = candidate.iter().map(|t| t.text.as_str()).collect();
    combine(reference, candidate, precision_parts(&r, &c, 1))
}

/// BLEU whose unigram precision counts keywords and function names five
/// times.
pub fn weighted_bleu(reference: &[Token], candidate: &[Token]) -> f64 {
    combine(reference, candidate, weighted_unigram(reference, candidate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::tokenize;

    fn toks(s: &str) -> Vec<Token> {
        tokenize(s).unwrap()
    }

    /// Clipped counts by greedily consuming reference positions.
    fn greedy_matches(r: &[Token], c: &[Token], n: usize) -> (usize, usize) {
        let text = |t: &[Token]| t.iter().map(|x| x.text.clone()).collect::<Vec<_>>();
        let (r, c) = (text(r), text(c));
        if c.len() < n {
            return (0, 0);
        }
        let mut used = vec![false; r.len().saturating_sub(n - 1)];
        let mut hits = 0;
        for i in 0..=c.len() - n {
            if let Some(j) = (0..used.len()).find(|&j| !used[j] && r[j..j + n] == c[i..i + n]) {
                used[j] = true;
                hits += 1;
            }
        }
        (hits, c.len() - n + 1)
    }

    fn oracle(r: &[Token], c: &[Token]) -> f64 {
        let mut product = 1.0;
        for n in 1..=4 {
            let (m, t) = greedy_matches(r, c, n);
            product *= match (n, m) {
                (1, 0) => return 0.0,
                (_, 0) => 1.0 / (t as f64 + 1.0),
                _ => m as f64 / t as f64,
            };
        }
        let bp = if c.len() < r.len() {
            (1.0 - r.len() as f64 / c.len() as f64).exp()
        } else {
            1.0
        };
        bp * product.powf(0.25)
    }

    #[test]
    fn identical_is_one() {
        let t = toks("let a = min(x, 2); return a * x");
        assert_eq!(bleu(&t, &t), 1.0);
        assert_eq!(weighted_bleu(&t, &t), 1.0);
        let short = toks("return x");
        assert_eq!(bleu(&short, &short), 1.0);
    }

    #[test]
    fn disjoint_and_empty() {
        assert!(bleu(&toks("a b c"), &toks("d e f")) < 0.01);
        assert_eq!(bleu(&[], &toks("a")), 0.0);
        assert_eq!(weighted_bleu(&toks("a"), &[]), 0.0);
    }

    #[test]
    fn hand_computed_pair() {
        // precisions 6/7, 5/6, 4/5, 3/4 multiply to 3/7
        let r = toks("let a = x ; return a");
        let c = toks("let a = x ; return x");
        let expected = (3.0f64 / 7.0).powf(0.25);
        assert!((bleu(&r, &c) - expected).abs() < 1e-12);
        assert!((oracle(&r, &c) - expected).abs() < 1e-12);
        // weighted unigram: 14 of 15 (let and return weigh 5)
        let expected = (7.0f64 / 15.0).powf(0.25);
        assert!((weighted_bleu(&r, &c) - expected).abs() < 1e-12);
    }

    #[test]
    fn hand_computed_weighted_six_tokens() {
        // unigram 9/14, then 3/5, 2/4, 1/3
        let r = toks("return abs(x);");
        let c = toks("return exp(x);");
        assert_eq!((r.len(), c.len()), (6, 6));
        let expected = (9.0f64 / 140.0).powf(0.25);
        assert!((weighted_bleu(&r, &c) - expected).abs() < 1e-12);
    }

    #[test]
    fn keyword_change_costs_more() {
        let r = toks("let a = x ; return a");
        let keyword = toks("foo a = x ; return a");
        let ident = toks("let a = x ; return foo");
        assert!((bleu(&r, &keyword) - bleu(&r, &ident)).abs() < 1e-12);
        assert!(weighted_bleu(&r, &keyword) < weighted_bleu(&r, &ident));
    }

    #[test]
    fn matches_greedy_oracle_on_random_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let vocab = ["a", "b", "c", "+", "(", ")", "return", "x"];
        for _ in 0..500 {
            let draw = |rng: &mut rand_chacha::ChaCha8Rng| {
                let n = rng.random_range(1..10);
                (0..n)
                    .map(|_| vocab[rng.random_range(0..vocab.len())])
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let (r, c) = (toks(&draw(&mut rng)), toks(&draw(&mut rng)));
            let (got, want) = (bleu(&r, &c), oracle(&r, &c));
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
            assert!((0.0..=1.0).contains(&got));
        }
    }

    #[test]
    fn whitespace_is_irrelevant() {
        let r = toks("let a = x;\nreturn a");
        let c1 = toks("let a=x; return  a*2");
        let c2 = toks("let   a =\tx;return a * 2");
        assert_eq!(bleu(&r, &c1), bleu(&r, &c2));
        assert_eq!(weighted_bleu(&r, &c1), weighted_bleu(&r, &c2));
    }
}
