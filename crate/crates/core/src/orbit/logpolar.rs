use std::f64::consts::{PI, TAU};
use std::ops::{Div, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A complex number stored as `(ln|z|, arg z)` so long products neither
/// overflow nor underflow. Zero is `ln|z| = -inf`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogPolar {
    pub log_mod: f64,
    /// Principal argument in `(-pi, pi]`.
    pub arg: f64,
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(t: f64) -> f64 {
    let mut r = t.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    r
}

impl LogPolar {
    pub const ONE: LogPolar = LogPolar { log_mod: 0.0, arg: 0.0 };

    pub fn from_complex(z: Complex64) -> Self {
        LogPolar { log_mod: z.norm().ln(), arg: z.arg() }
    }

    pub fn new(log_mod: f64, arg: f64) -> Self {
        LogPolar { log_mod, arg: wrap_angle(arg) }
    }

    pub fn to_complex(self) -> Complex64 {
        if self.log_mod == f64::NEG_INFINITY {
            return Complex64::new(0.0, 0.0);
        }
        let r = self.log_mod.exp();
        // keep real entries exactly real
        if self.arg == 0.0 {
            Complex64::new(r, 0.0)
        } else if self.arg == PI {
            Complex64::new(-r, 0.0)
        } else {
            Complex64::from_polar(r, self.arg)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_mod == f64::NEG_INFINITY
    }

    pub fn abs(&self) -> f64 {
        self.log_mod.exp()
    }

    pub fn log10_abs(&self) -> f64 {
        self.log_mod / std::f64::consts::LN_10
    }

    pub fn recip(self) -> Self {
        LogPolar::new(-self.log_mod, -self.arg)
    }
}

impl Mul for LogPolar {
    type Output = LogPolar;
    fn mul(self, rhs: LogPolar) -> LogPolar {
        LogPolar::new(self.log_mod + rhs.log_mod, self.arg + rhs.arg)
    }
}

impl Div for LogPolar {
    type Output = LogPolar;
    fn div(self, rhs: LogPolar) -> LogPolar {
        LogPolar::new(self.log_mod - rhs.log_mod, self.arg - rhs.arg)
    }
}
