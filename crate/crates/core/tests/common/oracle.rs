//! Frozen reference values and brute-force reference implementations.
//!
//! The numeric tables come from `oracles/gen_oracles.py` (mpmath at 60
//! significant digits, scipy for the rank test).

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// log10 of the two-tailed normal p-value at z = 1, 2, ..., 40.
pub const LOG10_P_Z_GRID: [f64; 40] = [
    -0.49851554582798930482,
    -1.3419860844769558528,
    -2.568669040265387882,
    -4.1983049118924976696,
    -6.2416156767266733011,
    -8.704834331812723014,
    -11.591823641811508642,
    -14.905112555353173363,
    -18.646434419908405509,
    -22.817023409822094699,
    -27.417786689382959693,
    -32.449409165527879436,
    -37.912419851963454401,
    -43.807235412841637404,
    -50.134189618611530172,
    -56.893553811233026678,
    -64.085551461008277356,
    -71.710368738403545713,
    -79.768162335217544503,
    -88.259065347411610725,
    -97.18319176638271819,
    -106.5406399543017229,
    -116.33149536636726465,
    -126.55583270702664808,
    -137.21371765533154499,
    -148.30520825848625541,
    -159.83035606712671778,
    -171.78920706757740671,
    -184.18180245305136005,
    -197.00817926599696819,
    -210.26837093653995422,
    -223.96240773652006432,
    -238.09031716448962258,
    -252.65212427387851171,
    -267.64785195408898969,
    -283.07752117238430526,
    -298.94115118294594048,
    -315.2387597082985267,
    -331.97036309736686701,
    -349.13597646368186089,
];

/// (k1, n1, k2, n2, z, log10 p) for the pooled two-proportion test.
pub const TWO_PROP_CASES: [(usize, usize, usize, usize, f64, f64); 3] = [
    (288, 300, 0, 300, 23.533936216582083831, -121.73669936434775412),
    (288, 300, 267, 300, 3.2549338848269398596, -2.9453150819064957462),
    (144, 300, 0, 300, 13.764944032233705954, -42.382784773402857026),
];

pub const PAIRED_A: [f64; 5] = [0.9, 0.8, 0.95, 0.85, 0.9];
pub const PAIRED_B: [f64; 5] = [0.5, 0.45, 0.55, 0.5, 0.52];
pub const PAIRED_T: f64 = 33.49674231969052288;
pub const PAIRED_P: f64 = 4.7376715977095063904e-6;

pub fn extreme_pairs() -> (Vec<f64>, Vec<f64>) {
    let a = (0..300).map(|i| 0.6 + 0.001 * (i % 17) as f64).collect();
    let b = (0..300).map(|i| 0.3 + 0.0015 * (i % 11) as f64).collect();
    (a, b)
}
pub const EXTREME_T: f64 = 758.17722408071554453;
pub const EXTREME_LOG10_P: f64 = -492.30851637197178278;

pub const WILCOXON_A: [f64; 8] = [0.9, 0.8, 0.95, 0.85, 0.9, 0.7, 0.6, 0.75];
pub const WILCOXON_B: [f64; 8] = [0.5, 0.8, 0.55, 0.45, 0.5, 0.72, 0.5, 0.35];
pub const WILCOXON_P: f64 = 0.026879244697072476;

/// scipy paired t-test on the cosines of `fixtures/gating`, computed from the
/// same floating-point values the harness sees.
pub const GATING_P: f64 = 0.05300000000062512;

/// Full-table LCS.
pub fn lcs_table(a: &[String], b: &[String]) -> usize {
    let mut t = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            t[i][j] = if a[i - 1] == b[j - 1] {
                t[i - 1][j - 1] + 1
            } else {
                t[i - 1][j].max(t[i][j - 1])
            };
        }
    }
    t[a.len()][b.len()]
}

/// (precision, recall, f1) from overlap counts, with the shared empty rules.
pub fn prf(overlap: usize, cand: usize, reference: usize) -> (f64, f64, f64) {
    match (cand, reference) {
        (0, 0) => (1.0, 1.0, 1.0),
        (0, _) | (_, 0) => (0.0, 0.0, 0.0),
        _ => {
            let p = overlap as f64 / cand as f64;
            let r = overlap as f64 / reference as f64;
            let f = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
            (p, r, f)
        }
    }
}

/// Clipped n-gram overlap by greedy matching against a consumable list.
pub fn ngram_overlap(cand: &[String], reference: &[String], n: usize) -> (usize, usize, usize) {
    let grams = |s: &[String]| -> Vec<Vec<String>> {
        if s.len() < n {
            Vec::new()
        } else {
            (0..=s.len() - n).map(|i| s[i..i + n].to_vec()).collect()
        }
    };
    let c = grams(cand);
    let mut r = grams(reference);
    let (cl, rl) = (c.len(), r.len());
    let mut overlap = 0;
    for g in &c {
        if let Some(pos) = r.iter().position(|x| x == g) {
            r.swap_remove(pos);
            overlap += 1;
        }
    }
    (overlap, cl, rl)
}

pub fn cosine_naive(a: &[String], b: &[String]) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return 1.0,
        (true, false) | (false, true) => return 0.0,
        _ => {}
    }
    let mut tf: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
    for t in a {
        tf.entry(t).or_default().0 += 1.0;
    }
    for t in b {
        tf.entry(t).or_default().1 += 1.0;
    }
    let dot: f64 = tf.values().map(|(x, y)| x * y).sum();
    let na: f64 = tf.values().map(|(x, _)| x * x).sum();
    let nb: f64 = tf.values().map(|(_, y)| y * y).sum();
    dot / (na.sqrt() * nb.sqrt())
}

/// Seeded token-pair corpus: lengths 0..=20 over the alphabet a..e.
pub fn token_pairs(count: usize, seed: u64) -> Vec<(Vec<String>, Vec<String>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seq = |rng: &mut ChaCha8Rng| -> Vec<String> {
        let len = rng.gen_range(0..=20);
        (0..len).map(|_| ((b'a' + rng.gen_range(0..5u8)) as char).to_string()).collect()
    };
    (0..count).map(|_| (seq(&mut rng), seq(&mut rng))).collect()
}
