/// A finite nonnegative sequence on the integers, zero outside `[lo, lo + len)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub lo: i64,
    pub values: Vec<f64>,
}

impl Profile {
    pub fn new(lo: i64, values: Vec<f64>) -> Self {
        Profile { lo, values }
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    pub fn get(&self, j: i64) -> f64 {
        let i = j - self.lo;
        if i < 0 || i >= self.values.len() as i64 {
            0.0
        } else {
            self.values[i as usize]
        }
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.lo + i as i64, v))
    }

    /// Largest pointwise difference over the union of both supports.
    pub fn max_abs_diff(&self, other: &Profile) -> f64 {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        (lo..=hi)
            .map(|j| (self.get(j) - other.get(j)).abs())
            .fold(0.0, f64::max)
    }
}

/// Column-resolved distribution: column `2x` holds the arcs `((x, m); 1)`,
/// column `2x + 1` the arcs `((x, m); 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FullDistribution {
    pub columns: Vec<Profile>,
}

impl FullDistribution {
    pub fn column(&self, c: usize) -> Option<&Profile> {
        self.columns.get(c)
    }

    pub fn total(&self) -> f64 {
        self.columns.iter().map(Profile::total).sum()
    }

    pub fn max_abs_diff(&self, other: &FullDistribution) -> f64 {
        let n = self.columns.len().max(other.columns.len());
        let empty = Profile::new(0, Vec::new());
        (0..n)
            .map(|c| {
                let a = self.columns.get(c).unwrap_or(&empty);
                let b = other.columns.get(c).unwrap_or(&empty);
                a.max_abs_diff(b)
            })
            .fold(0.0, f64::max)
    }
}
