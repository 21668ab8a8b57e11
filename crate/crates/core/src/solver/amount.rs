//! Integer arithmetic shared by the search routines: sizes are rescaled to a
//! common denominator and searched either as `u128` or, when that could
//! overflow, as `BigInt`.

use std::fmt::Debug;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Rem, Sub};

use num::{BigInt, Zero};

pub(crate) trait Amount:
    Clone
    + Debug
    + Default
    + Ord
    + Hash
    + Zero
    + From<u64>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Rem<Output = Self>
{
    fn times(&self, count: usize) -> Self {
        self.clone() * Self::from(count as u64)
    }

    fn ceil_div(&self, by: &Self) -> Self {
        let q = self.clone() / by.clone();
        if (self.clone() % by.clone()).is_zero() {
            q
        } else {
            q + Self::from(1)
        }
    }

    fn to_usize(&self) -> usize;
}

impl Amount for u128 {
    fn to_usize(&self) -> usize {
        *self as usize
    }
}

impl Amount for BigInt {
    fn to_usize(&self) -> usize {
        num::ToPrimitive::to_usize(self).expect("bin count fits usize")
    }
}
