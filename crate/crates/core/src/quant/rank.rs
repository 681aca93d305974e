// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Pareto ranking on (realism, complexity grade).
//!
//! Higher realism and lower grade are better. Realism values within `eps`
//! of each other count as equal. Candidates equal in both are ties: the
//! first in input order stays on the front and the others are reported as
//! dominated by it.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    /// Front members sorted by realism (descending), then grade, then input order.
    pub front: Vec<usize>,
    /// `(candidate, front member that dominates or ties it)`, in input order.
    pub dominated: Vec<(usize, usize)>,
}

impl Ranking {
    pub fn on_front(&self, i: usize) -> bool {
        self.front.contains(&i)
    }
}

/// `a` dominates `b`: no worse in both criteria and better in one.
pub fn dominates(a: (f64, u8), b: (f64, u8), eps: f64) -> bool {
    let no_worse = a.0 >= b.0 - eps && a.1 <= b.1;
    let better = a.0 > b.0 + eps || a.1 < b.1;
    no_worse && better
}

fn ties(a: (f64, u8), b: (f64, u8), eps: f64) -> bool {
    (a.0 - b.0).abs() <= eps && a.1 == b.1
}

pub fn rank_candidates(points: &[(f64, u8)], eps: f64) -> Ranking {
    let beaten_by = |i: usize| {
        (0..points.len())
            .find(|&j| j != i && (dominates(points[j], points[i], eps) || (j < i && ties(points[j], points[i], eps))))
    };
    let mut front = Vec::new();
    let mut beaten = Vec::new();
    for i in 0..points.len() {
        match beaten_by(i) {
            None => front.push(i),
            Some(j) => beaten.push((i, j)),
        }
    }
    // point every dominated candidate at a front member that covers it
    let dominated = beaten
        .into_iter()
        .map(|(i, j)| {
            let rep = front
                .iter()
                .copied()
                .find(|&f| dominates(points[f], points[i], eps) || (f < i && ties(points[f], points[i], eps)))
                .unwrap_or(j);
            (i, rep)
        })
        .collect();
    front.sort_by(|&a, &b| {
        points[b]
            .0
            .total_cmp(&points[a].0)
            .then(points[a].1.cmp(&points[b].1))
            .then(a.cmp(&b))
    });
    Ranking { front, dominated }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_candidates() {
        let r = rank_candidates(&[(0.9, 4), (0.9, 2), (0.5, 1)], 1e-9);
        assert_eq!(r.front, vec![1, 2]);
        assert_eq!(r.dominated, vec![(0, 1)]);
    }

    #[test]
    fn singleton_and_ties() {
        assert_eq!(rank_candidates(&[(0.3, 2)], 1e-9).front, vec![0]);
        let r = rank_candidates(&[(0.5, 3), (0.5, 3), (0.5 + 1e-12, 3)], 1e-9);
        assert_eq!(r.front, vec![0]);
        assert_eq!(r.dominated, vec![(1, 0), (2, 0)]);
    }
}
