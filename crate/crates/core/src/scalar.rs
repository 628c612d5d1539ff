//! Integer scalar abstraction shared by the exact-arithmetic modules.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

/// Exact signed integers usable as slope coordinates.
///
/// Implemented for every type meeting the bounds, which covers the primitive
/// signed integers and `num_bigint::BigInt`.
pub trait Integer:
    num_integer::Integer + num_traits::Signed + Clone + Debug + Display + FromStr + Hash + Send + Sync
{
}

impl<T> Integer for T where
    T: num_integer::Integer + num_traits::Signed + Clone + Debug + Display + FromStr + Hash + Send + Sync
{
}
