//! Small permutation utilities used by exact enumeration.

/// Advances `v` to the next lexicographic permutation. Returns `false` (and
/// leaves `v` sorted ascending) after the last one.
pub fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// All permutations of `items` in lexicographic order of positions.
pub fn all_permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    let mut idx: Vec<usize> = (0..items.len()).collect();
    let mut out = Vec::with_capacity(factorial(items.len()));
    loop {
        out.push(idx.iter().map(|&i| items[i].clone()).collect());
        if !next_permutation(&mut idx) {
            break;
        }
    }
    out
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_every_permutation_once() {
        let perms = all_permutations(&[1, 2, 3, 4]);
        assert_eq!(perms.len(), 24);
        let mut sorted = perms.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 24);
        assert_eq!(all_permutations::<u8>(&[]).len(), 1);
    }
}
