//! Standard shifts used in examples, tests and the `verify` command.
//!
//! * `FULL2`: full shift on `{0, 1}`, adjacency all ones.
//! * `GOLDEN`: golden-mean shift, adjacency `[[1,1],[1,0]]` (no `11`).
//! * `CYCLE2`: the single two-cycle, adjacency `[[0,1],[1,0]]`.

use crate::sft::Sft;

pub fn full2() -> Sft {
    Sft::full(2)
}

pub fn golden() -> Sft {
    Sft::new(2, &[vec![1, 1], vec![1, 0]]).expect("golden-mean shift is valid")
}

pub fn cycle2() -> Sft {
    Sft::new(2, &[vec![0, 1], vec![1, 0]]).expect("two-cycle is valid")
}

/// All three fixtures with their names.
pub fn all() -> Vec<(&'static str, Sft)> {
    vec![("FULL2", full2()), ("GOLDEN", golden()), ("CYCLE2", cycle2())]
}
