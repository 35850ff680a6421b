use crate::model::CspInstance;

/// Above this many total assignments exhaustive enumeration gets slow.
pub const ENUMERATION_ADVISORY: u64 = 10_000_000;

pub fn exceeds_enumeration_advisory(instance: &CspInstance) -> bool {
    crate::model::checked_pow(instance.d() as u64, instance.n())
        .is_none_or(|total| total > ENUMERATION_ADVISORY)
}

/// Counts satisfying assignments by visiting all `d^n` of them in
/// lexicographic order, stopping once `cap` solutions are found.
pub fn enumerate_solutions(instance: &CspInstance, cap: u64) -> u64 {
    let (n, d) = (instance.n(), instance.d());
    let mut values = vec![0usize; n];
    let mut count = 0u64;
    loop {
        if count >= cap {
            return count;
        }
        if !instance
            .constraints()
            .iter()
            .any(|c| c.violated_by(&values, d))
        {
            count += 1;
        }
        // odometer increment, last variable fastest
        let mut i = n;
        loop {
            if i == 0 {
                return count;
            }
            i -= 1;
            values[i] += 1;
            if values[i] < d {
                break;
            }
            values[i] = 0;
        }
    }
}
