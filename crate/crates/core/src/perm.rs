//! Small permutation helpers shared by the Leibniz-style sums.

/// Calls `f(perm, sign)` for every permutation of `0..n`, in lexicographic
/// order. `sign` is `+1` or `-1`.
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize], i64)) {
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        f(&perm, sign(&perm));
        if !next_permutation(&mut perm) {
            break;
        }
    }
}

/// Advances `perm` to the next permutation in lexicographic order. Returns
/// false after the last one.
pub fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| perm[i] < perm[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
    perm.swap(i, j);
    perm[i + 1..].reverse();
    true
}

/// Cycle decomposition; each cycle starts at its smallest element and cycles
/// are listed by increasing first element. Fixed points are included.
pub fn cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cyc.push(i);
            i = perm[i];
        }
        out.push(cyc);
    }
    out
}

/// Signature `(-1)^(n - #cycles)`.
pub fn sign(perm: &[usize]) -> i64 {
    let c = cycles(perm).len();
    if (perm.len() - c).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// All permutations `sigma` of `0..n` with `sigma(i) ∈ allowed[i]`, found by
/// depth-first search. Calls `f` with each one.
pub fn for_each_restricted_permutation(allowed: &[Vec<usize>], mut f: impl FnMut(&[usize])) {
    let n = allowed.len();
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn rec(i: usize, allowed: &[Vec<usize>], perm: &mut Vec<usize>, used: &mut Vec<bool>, f: &mut dyn FnMut(&[usize])) {
        if i == allowed.len() {
            f(perm);
            return;
        }
        for &j in &allowed[i] {
            if !used[j] {
                used[j] = true;
                perm[i] = j;
                rec(i + 1, allowed, perm, used, f);
                used[j] = false;
            }
        }
    }
    rec(0, allowed, &mut perm, &mut used, &mut f);
}
