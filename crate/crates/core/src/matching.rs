//! Maximum bipartite matching by augmenting paths.

/// Maximum matching between `left` vertices and `right` vertices where
/// `adj[l]` lists the right neighbours of `l` in preference order. Returns the
/// right partner of each left vertex.
pub fn max_matching(adj: &[Vec<usize>], right: usize) -> Vec<Option<usize>> {
    let mut match_right: Vec<Option<usize>> = vec![None; right];
    for l in 0..adj.len() {
        let mut visited = vec![false; right];
        augment(l, adj, &mut visited, &mut match_right);
    }
    let mut match_left = vec![None; adj.len()];
    for (r, l) in match_right.iter().enumerate() {
        if let Some(l) = *l {
            match_left[l] = Some(r);
        }
    }
    match_left
}

fn augment(l: usize, adj: &[Vec<usize>], visited: &mut [bool], match_right: &mut [Option<usize>]) -> bool {
    for &r in &adj[l] {
        if visited[r] {
            continue;
        }
        visited[r] = true;
        let free = match match_right[r] {
            None => true,
            Some(other) => augment(other, adj, visited, match_right),
        };
        if free {
            match_right[r] = Some(l);
            return true;
        }
    }
    false
}

/// Perfect matching of left onto right when both sides have the same size.
pub fn perfect_matching(adj: &[Vec<usize>], right: usize) -> Option<Vec<usize>> {
    if adj.len() != right {
        return None;
    }
    max_matching(adj, right).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_augmenting_path() {
        // 0-{0,1}, 1-{0}: greedy would take 0-0 then fail for 1.
        let adj = vec![vec![0, 1], vec![0]];
        assert_eq!(perfect_matching(&adj, 2), Some(vec![1, 0]));
    }

    #[test]
    fn deficient_graph() {
        let adj = vec![vec![0], vec![0], vec![1, 2]];
        let m = max_matching(&adj, 3);
        assert_eq!(m.iter().flatten().count(), 2);
        assert_eq!(perfect_matching(&adj, 3), None);
    }
}
