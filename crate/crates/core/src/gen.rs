//! Seeded generators for random words, presentations, slides, and
//! automorphisms. The property suites and the acceptance harness draw all
//! their instances from here, so everything is a pure function of the
//! supplied [`SplitMix64`] state.

use crate::moves::{AutomorphismSpec, NielsenAut, SlideSpec};
use crate::presentation::Presentation;
use crate::rng::SplitMix64;
use crate::word::{Letter, Sign, Word};

fn random_letter(rng: &mut SplitMix64, rank: u16) -> Letter {
    let index = rng.range(1, rank as u64) as u16;
    let sign = if rng.chance(1, 2) { Sign::Plus } else { Sign::Minus };
    Letter::new(index, sign)
}

/// Unreduced letter sequence of exactly `len` letters.
pub fn raw_letters(rng: &mut SplitMix64, rank: u16, len: usize) -> Vec<Letter> {
    assert!(rank >= 1);
    (0..len).map(|_| random_letter(rng, rank)).collect()
}

/// Reduced word of exactly `len` letters: successive letters never cancel.
pub fn reduced_word(rng: &mut SplitMix64, rank: u16, len: usize) -> Word {
    assert!(rank >= 1);
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = random_letter(rng, rank);
        if letters.last() == Some(&l.inverse()) {
            continue;
        }
        letters.push(l);
    }
    Word::reduce(letters)
}

/// Balanced presentation with relator lengths drawn from `0..=max_len`.
pub fn presentation(rng: &mut SplitMix64, rank: u16, max_len: usize) -> Presentation {
    let relators = (0..rank)
        .map(|_| {
            let len = rng.below(max_len as u64 + 1) as usize;
            reduced_word(rng, rank, len)
        })
        .collect();
    Presentation::new(rank, relators).expect("generated relators respect rank")
}

/// Slide spec with distinct relator indices and `|path|, |conjugator| <= max_word`.
pub fn slide_spec(rng: &mut SplitMix64, rank: u16, max_word: usize) -> SlideSpec {
    assert!(rank >= 2);
    let target = rng.range(1, rank as u64) as u16;
    let mut other = rng.range(1, rank as u64) as u16;
    while other == target {
        other = rng.range(1, rank as u64) as u16;
    }
    let sign = |rng: &mut SplitMix64| if rng.chance(1, 2) { Sign::Plus } else { Sign::Minus };
    let path_len = rng.below(max_word as u64 + 1) as usize;
    let path = reduced_word(rng, rank, path_len);
    let target_sign = sign(rng);
    let other_sign = sign(rng);
    let conjugator_len = rng.below(max_word as u64 + 1) as usize;
    let conjugator = reduced_word(rng, rank, conjugator_len);
    SlideSpec {
        target,
        other,
        path,
        target_sign,
        other_sign,
        conjugator,
    }
}

/// Composition of `steps` elementary Nielsen automorphisms.
pub fn automorphism(rng: &mut SplitMix64, rank: u16, steps: usize) -> AutomorphismSpec {
    assert!(rank >= 1);
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let gen = rng.range(1, rank as u64) as u16;
        let kind = if rank == 1 { 0 } else { rng.below(3) };
        out.push(match kind {
            0 => NielsenAut::InvertGen { gen },
            1 => {
                let mut by = rng.range(1, rank as u64) as u16;
                while by == gen {
                    by = rng.range(1, rank as u64) as u16;
                }
                let sign = if rng.chance(1, 2) { Sign::Plus } else { Sign::Minus };
                NielsenAut::MultiplyGen { gen, by, sign }
            }
            _ => {
                let mut second = rng.range(1, rank as u64) as u16;
                while second == gen {
                    second = rng.range(1, rank as u64) as u16;
                }
                NielsenAut::SwapGens { first: gen, second }
            }
        });
    }
    AutomorphismSpec::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let mut a = SplitMix64::new(99);
        let mut b = SplitMix64::new(99);
        assert_eq!(reduced_word(&mut a, 3, 10), reduced_word(&mut b, 3, 10));
        assert_eq!(presentation(&mut a, 3, 6), presentation(&mut b, 3, 6));
    }

    #[test]
    fn reduced_word_has_exact_length() {
        let mut rng = SplitMix64::new(100);
        for len in 0..30 {
            assert_eq!(reduced_word(&mut rng, 2, len).len(), len);
        }
    }
}
