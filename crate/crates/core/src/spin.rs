use std::fmt;

/// A non-negative half-integer angular momentum, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Spin(u32);

impl Spin {
    pub const ZERO: Spin = Spin(0);
    pub const HALF: Spin = Spin(1);

    pub const fn from_twice(twice: u32) -> Self {
        Spin(twice)
    }

    /// Rounds `value` to the nearest half-integer.
    pub fn from_f64(value: f64) -> Self {
        assert!(value >= 0.0, "spin must be non-negative, got {value}");
        Spin((2.0 * value).round() as u32)
    }

    pub const fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// `I(I+1)`, the eigenvalue of the squared spin operator.
    pub fn casimir(self) -> f64 {
        let i = self.value();
        i * (i + 1.0)
    }

    /// `2I + 1`
    pub const fn multiplicity(self) -> usize {
        self.0 as usize + 1
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// Twice the magnetic quantum numbers `-I, -I+1, ..., I`.
    pub fn twice_projections(self) -> impl Iterator<Item = i32> + Clone {
        let t = self.0 as i32;
        (0..=self.0 as i32).map(move |k| -t + 2 * k)
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn casimir_and_display() {
        assert_eq!(Spin::HALF.casimir(), 0.75);
        assert_eq!(Spin::from_twice(4).casimir(), 6.0);
        assert_eq!(Spin::from_twice(3).to_string(), "3/2");
        assert_eq!(Spin::from_twice(4).to_string(), "2");
        assert_eq!(Spin::from_f64(1.5), Spin::from_twice(3));
        let m: Vec<i32> = Spin::from_twice(3).twice_projections().collect();
        assert_eq!(m, vec![-3, -1, 1, 3]);
    }
}
