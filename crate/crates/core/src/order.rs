use core::fmt;

use crate::{Error, Result};

/// Order `β` of the Caputo derivative, restricted to `0 < β ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub const ONE: FractionalOrder = FractionalOrder(1.0);

    pub fn new(beta: f64) -> Result<Self> {
        if beta > 0.0 && beta <= 1.0 {
            Ok(FractionalOrder(beta))
        } else {
            Err(Error::InvalidOrder(beta))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for FractionalOrder {
    type Error = Error;

    fn try_from(beta: f64) -> Result<Self> {
        FractionalOrder::new(beta)
    }
}

impl From<FractionalOrder> for f64 {
    fn from(beta: FractionalOrder) -> f64 {
        beta.0
    }
}

impl fmt::Display for FractionalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_half_open_interval() {
        assert!(FractionalOrder::new(1.0).is_ok());
        assert!(FractionalOrder::new(1e-12).is_ok());
        for bad in [0.0, -0.5, 1.0 + 1e-15, f64::NAN, f64::INFINITY] {
            assert!(FractionalOrder::new(bad).is_err(), "{bad} accepted");
        }
    }
}
