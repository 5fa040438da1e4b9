use num_traits::{PrimInt, Signed};
use std::fmt::{Debug, Display};
use std::hash::Hash;

/// Signed machine integers usable as throughput values.
pub trait Int: PrimInt + Signed + Debug + Display + Hash + Send + Sync + 'static {
    fn from_u64(x: u64) -> Option<Self> {
        <Self as num_traits::NumCast>::from(x)
    }

    fn to_i128(self) -> i128 {
        num_traits::ToPrimitive::to_i128(&self).expect("machine integer fits in i128")
    }

    /// `2^ell`, or `None` on overflow.
    fn pow2(ell: u32) -> Option<Self> {
        if ell as usize >= 8 * std::mem::size_of::<Self>() - 1 {
            None
        } else {
            Some(Self::one() << ell as usize)
        }
    }
}

impl Int for i32 {}
impl Int for i64 {}
impl Int for i128 {}
