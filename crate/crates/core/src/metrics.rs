//! Pass@k and difficulty buckets.

use core::fmt;

use crate::lang::Program;

/// Fraction of problems with at least one correct response among the first
/// `k`. `correct[i][j]` is the verdict for response `j` of problem `i`.
/// Problems with fewer than `k` responses count what they have.
pub fn pass_at_k<R: AsRef<[bool]>>(correct: &[R], k: usize) -> f64 {
    if correct.is_empty() || k == 0 {
        return 0.0;
    }
    let hits = correct
        .iter()
        .filter(|row| row.as_ref().iter().take(k).any(|&c| c))
        .count();
    hits as f64 / correct.len() as f64
}

/// Non-`Get` instruction count.
pub fn operator_count(p: &Program) -> usize {
    p.operator_count()
}

/// Difficulty level by operator count: 2 (or fewer), 3, 4, 5, 6 or more.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DifficultyBucket {
    UpTo2,
    Three,
    Four,
    Five,
    SixPlus,
}

impl DifficultyBucket {
    pub const ALL: [DifficultyBucket; 5] = [
        DifficultyBucket::UpTo2,
        DifficultyBucket::Three,
        DifficultyBucket::Four,
        DifficultyBucket::Five,
        DifficultyBucket::SixPlus,
    ];

    pub fn from_count(n: usize) -> DifficultyBucket {
        match n {
            0..=2 => DifficultyBucket::UpTo2,
            3 => DifficultyBucket::Three,
            4 => DifficultyBucket::Four,
            5 => DifficultyBucket::Five,
            _ => DifficultyBucket::SixPlus,
        }
    }

    pub fn of(p: &Program) -> DifficultyBucket {
        DifficultyBucket::from_count(operator_count(p))
    }

    pub fn label(self) -> &'static str {
        match self {
            DifficultyBucket::UpTo2 => "2",
            DifficultyBucket::Three => "3",
            DifficultyBucket::Four => "4",
            DifficultyBucket::Five => "5",
            DifficultyBucket::SixPlus => ">=6",
        }
    }
}

impl fmt::Display for DifficultyBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}
