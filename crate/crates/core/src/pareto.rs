//! Vector dominance and Pareto filtering.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, Result};
pub use crate::model::Direction;

fn better<T: PartialOrd>(a: &T, b: &T, d: Direction) -> Option<Ordering> {
    match d {
        Direction::Maximize => a.partial_cmp(b),
        Direction::Minimize => b.partial_cmp(a),
    }
}

fn check_dims(len: usize, dirs: &[Direction]) -> Result<()> {
    if len != dirs.len() {
        return Err(Error::Dimension { expected: dirs.len(), found: len });
    }
    Ok(())
}

/// At least as good everywhere and strictly better somewhere.
pub fn dominates<T: PartialOrd>(a: &[T], b: &[T], dirs: &[Direction]) -> Result<bool> {
    check_dims(a.len(), dirs)?;
    check_dims(b.len(), dirs)?;
    Ok(dominates_unchecked(a, b, dirs))
}

fn dominates_unchecked<T: PartialOrd>(a: &[T], b: &[T], dirs: &[Direction]) -> bool {
    let mut strict = false;
    for ((x, y), d) in a.iter().zip(b).zip(dirs) {
        match better(x, y, *d) {
            Some(Ordering::Greater) => strict = true,
            Some(Ordering::Equal) => {}
            _ => return false,
        }
    }
    strict
}

/// Ids of the non-dominated items, in input order.
pub fn pareto_filter<I: Clone, T: Ord + Sync>(items: &[(I, Vec<T>)], dirs: &[Direction]) -> Result<Vec<I>> {
    let vectors: Vec<&[T]> = items.iter().map(|(_, v)| v.as_slice()).collect();
    Ok(pareto_indices(&vectors, dirs)?.into_iter().map(|i| items[i].0.clone()).collect())
}

/// Positions of the non-dominated vectors, ascending.
pub fn pareto_indices<T: Ord + Sync, V: AsRef<[T]> + Sync>(vectors: &[V], dirs: &[Direction]) -> Result<Vec<usize>> {
    if vectors.is_empty() {
        return Err(Error::Empty("pareto filter input"));
    }
    for v in vectors {
        check_dims(v.as_ref().len(), dirs)?;
    }
    if dirs.len() == 2 {
        return Ok(front_2d(vectors, dirs));
    }
    Ok(scan(vectors, dirs))
}

/// Pairwise scan over all vectors.
pub fn pareto_scan<T: PartialOrd + Sync, V: AsRef<[T]> + Sync>(vectors: &[V], dirs: &[Direction]) -> Result<Vec<usize>> {
    if vectors.is_empty() {
        return Err(Error::Empty("pareto filter input"));
    }
    for v in vectors {
        check_dims(v.as_ref().len(), dirs)?;
    }
    Ok(scan(vectors, dirs))
}

fn scan<T: PartialOrd + Sync, V: AsRef<[T]> + Sync>(vectors: &[V], dirs: &[Direction]) -> Vec<usize> {
    (0..vectors.len())
        .into_par_iter()
        .filter(|&i| !vectors.iter().any(|o| dominates_unchecked(o.as_ref(), vectors[i].as_ref(), dirs)))
        .collect()
}

/// Two objectives: sort best-first on the first, sweep the second.
fn front_2d<T: Ord, V: AsRef<[T]>>(vectors: &[V], dirs: &[Direction]) -> Vec<usize> {
    let cmp = |x: &T, y: &T, d: Direction| better(x, y, d).unwrap();
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (vectors[i].as_ref(), vectors[j].as_ref());
        cmp(&b[0], &a[0], dirs[0]).then(cmp(&b[1], &a[1], dirs[1]))
    });
    let mut keep = Vec::new();
    let mut best: Option<&T> = None;
    let mut g = 0;
    while g < order.len() {
        let head = vectors[order[g]].as_ref();
        let mut end = g;
        while end < order.len() && vectors[order[end]].as_ref()[0] == head[0] {
            end += 1;
        }
        // inside a group the first entries carry the group's best second value
        let top = &head[1];
        if best.is_none_or(|b| cmp(top, b, dirs[1]) == Ordering::Greater) {
            keep.extend(order[g..end].iter().copied().filter(|&i| vectors[i].as_ref()[1] == *top));
            best = Some(top);
        }
        g = end;
    }
    keep.sort_unstable();
    keep
}
