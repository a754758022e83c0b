//! Independent reference computations shared by the property suites.
#![allow(dead_code)]

use std::collections::BTreeSet;

use discalign::model::{RstTree, SpanSet};

/// Every character position in a span set.
pub fn positions(s: &SpanSet) -> BTreeSet<usize> {
    s.spans().iter().flat_map(|x| x.start()..x.end()).collect()
}

pub fn overlap_oracle(a: &SpanSet, b: &SpanSet) -> usize {
    positions(a).intersection(&positions(b)).count()
}

pub fn margin_oracle(candidate: &SpanSet, target: &SpanSet) -> usize {
    positions(candidate).difference(&positions(target)).count()
}

/// Deepest internal node with `a` and `b` below different children, found
/// by testing every internal node.
pub fn brute_lcr(t: &RstTree, a: usize, b: usize) -> Option<usize> {
    let under = |anc: usize, x: usize| {
        let mut cur = Some(x);
        while let Some(c) = cur {
            if c == anc {
                return true;
            }
            cur = t.node(c).parent;
        }
        false
    };
    t.internal_nodes()
        .filter(|&n| {
            let ca = t.node(n).children.iter().position(|&c| under(c, a));
            let cb = t.node(n).children.iter().position(|&c| under(c, b));
            matches!((ca, cb), (Some(x), Some(y)) if x != y)
        })
        .max_by_key(|&n| t.node(n).depth)
}

/// Best node for an argument by per-character set arithmetic over every
/// node: `(node, overlap, margin)`.
pub fn brute_match(arg: &SpanSet, t: &RstTree) -> Option<(usize, usize, usize)> {
    let target = positions(arg);
    let score = |n: usize| {
        let s = t.span(n);
        let own: BTreeSet<usize> = (s.start()..s.end()).collect();
        let overlap = own.intersection(&target).count();
        (n, overlap, own.len() - overlap)
    };
    let key = |&(n, o, m): &(usize, usize, usize)| {
        let s = t.span(n);
        (
            std::cmp::Reverse(o as i64 - m as i64),
            std::cmp::Reverse(o),
            m,
            s.len(),
            s.start(),
        )
    };
    let best_of = |nodes: Vec<usize>| nodes.into_iter().map(score).filter(|x| x.1 > 0).min_by_key(key);
    let edu = best_of(t.leaves().collect())?;
    match best_of(t.internal_nodes().collect()) {
        Some(sub) if sub.1 as i64 - sub.2 as i64 > edu.1 as i64 - edu.2 as i64 => Some(sub),
        _ => Some(edu),
    }
}

/// Γ(df/2) for positive integer df.
fn half_gamma(df: u32) -> f64 {
    let (mut g, mut z) = if df.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (std::f64::consts::PI.sqrt(), 0.5)
    };
    while z < df as f64 / 2.0 {
        g *= z;
        z += 1.0;
    }
    g
}

/// Upper tail of the χ² distribution by composite Simpson integration of
/// its density from `x` to `x + 600`.
pub fn chi2_sf_oracle(x: f64, df: u32) -> f64 {
    let k = df as f64 / 2.0;
    let norm = 2f64.powf(k) * half_gamma(df);
    let f = |t: f64| t.powf(k - 1.0) * (-t / 2.0).exp() / norm;
    let (a, b) = (x, x + 600.0);
    let n = 400_000;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

fn factorial(n: u64) -> u128 {
    (1..=n as u128).product()
}

/// Every row with sum `total` that fits under the remaining column sums.
fn rows_within(total: u64, caps: &[u64]) -> Vec<Vec<u64>> {
    match caps {
        [] => vec![],
        [last] => {
            if total <= *last {
                vec![vec![total]]
            } else {
                vec![]
            }
        }
        [first, rest @ ..] => (0..=total.min(*first))
            .flat_map(|x| {
                rows_within(total - x, rest).into_iter().map(move |mut r| {
                    r.insert(0, x);
                    r
                })
            })
            .collect(),
    }
}

/// Two-sided Fisher p-value in exact integer arithmetic, for N ≤ 20.
/// Each table's weight Π r! Π c! / Π x! is an integer; p is the weight
/// of tables no more probable than the observed one, over N!.
pub fn fisher_brute(t: &[Vec<u64>]) -> f64 {
    let rows: Vec<u64> = t.iter().map(|r| r.iter().sum()).collect();
    let c = t[0].len();
    let cols: Vec<u64> = (0..c).map(|j| t.iter().map(|r| r[j]).sum()).collect();
    let n: u64 = rows.iter().sum();
    assert!(n <= 20);
    let k: u128 = rows.iter().chain(&cols).map(|&x| factorial(x)).product();
    let weight = |tab: &[Vec<u64>]| -> u128 { tab.iter().flatten().map(|&x| factorial(x)).product() };
    let obs = weight(t);
    let mut hit: u128 = 0;
    let mut stack: Vec<(Vec<Vec<u64>>, Vec<u64>)> = vec![(vec![], cols.clone())];
    while let Some((partial, caps)) = stack.pop() {
        if partial.len() == rows.len() {
            let d = weight(&partial);
            if d >= obs {
                hit += k / d;
            }
            continue;
        }
        for row in rows_within(rows[partial.len()], &caps) {
            let caps: Vec<u64> = caps.iter().zip(&row).map(|(a, b)| a - b).collect();
            let mut p = partial.clone();
            p.push(row);
            stack.push((p, caps));
        }
    }
    hit as f64 / factorial(n) as f64
}
