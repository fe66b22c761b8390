//! Value precision.
//!
//! Every numeric container in the crate is generic over [`Scalar`], which is
//! implemented for `f32` and `f64`. The atomic companion type backs the shared
//! output rows written by nnz-balanced partitions.

use std::fmt::{Debug, Display};
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use num_traits::Float;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub trait Scalar:
    Float + Default + Debug + Display + FromStr + Send + Sync + Serialize + DeserializeOwned + 'static
{
    type Atomic: Send + Sync;

    const PRECISION: Precision;

    fn new_atomic(v: Self) -> Self::Atomic;
    fn load(a: &Self::Atomic) -> Self;
    fn store(a: &Self::Atomic, v: Self);
    /// Atomic `*a += v` via compare-and-swap on the bit pattern.
    fn fetch_add(a: &Self::Atomic, v: Self);

    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
}

macro_rules! impl_scalar {
    ($float:ty, $atomic:ty, $precision:expr) => {
        impl Scalar for $float {
            type Atomic = $atomic;

            const PRECISION: Precision = $precision;

            #[inline]
            fn new_atomic(v: Self) -> Self::Atomic {
                <$atomic>::new(v.to_bits())
            }

            #[inline]
            fn load(a: &Self::Atomic) -> Self {
                <$float>::from_bits(a.load(Ordering::Relaxed))
            }

            #[inline]
            fn store(a: &Self::Atomic, v: Self) {
                a.store(v.to_bits(), Ordering::Relaxed)
            }

            #[inline]
            fn fetch_add(a: &Self::Atomic, v: Self) {
                let mut current = a.load(Ordering::Relaxed);
                loop {
                    let next = (<$float>::from_bits(current) + v).to_bits();
                    match a.compare_exchange_weak(current, next, Ordering::Relaxed, Ordering::Relaxed) {
                        Ok(_) => return,
                        Err(seen) => current = seen,
                    }
                }
            }

            #[inline]
            fn from_f64(v: f64) -> Self {
                v as $float
            }

            #[inline]
            fn to_f64(self) -> f64 {
                self as f64
            }
        }
    };
}

impl_scalar!(f32, AtomicU32, Precision::F32);
impl_scalar!(f64, AtomicU64, Precision::F64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    F32,
    F64,
}

impl Precision {
    /// Bits needed to store one value (β_float in the memory formula).
    pub fn bits(self) -> u32 {
        match self {
            Precision::F32 => 32,
            Precision::F64 => 64,
        }
    }
}
