#![allow(dead_code)]

use cycpres_core::Word;
use proptest::prelude::*;
use rand::Rng;

/// Raw letter sequences, possibly unreduced.
pub fn letters(rank: usize, max_len: usize) -> impl Strategy<Value = Vec<(usize, i64)>> {
    prop::collection::vec((0..rank, prop_oneof![Just(-1i64), Just(1i64)]), 0..=max_len)
}

pub fn word(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    letters(rank, max_len).prop_map(move |ls| Word::reduce(rank, ls).unwrap())
}

/// Free reduction by a letter stack, independent of `Word::reduce`.
pub fn stack_reduce(letters: &[(usize, i64)]) -> Vec<(usize, i64)> {
    let mut stack: Vec<(usize, i64)> = Vec::new();
    for &(g, e) in letters {
        let step = e.signum();
        for _ in 0..e.unsigned_abs() {
            if stack.last() == Some(&(g, -step)) {
                stack.pop();
            } else {
                stack.push((g, step));
            }
        }
    }
    stack
}

pub fn unit_letters(w: &Word) -> Vec<(usize, i64)> {
    w.letters().map(|(g, e)| (g.index(), e)).collect()
}

pub fn random_word<R: Rng>(rng: &mut R, rank: usize, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    let ls: Vec<(usize, i64)> = (0..len)
        .map(|_| (rng.gen_range(0..rank), if rng.gen() { 1 } else { -1 }))
        .collect();
    Word::reduce(rank, ls).unwrap()
}
