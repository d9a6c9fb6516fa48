use super::Dag;
use crate::error::{Error, Result};

/// True iff `x` and `y` are d-separated by `z` in `dag`.
///
/// Reachability over (node, direction) states: a trail may leave a node
/// upward (to a parent) or downward (to a child). Non-colliders block when
/// conditioned on; colliders pass only when they have a descendant in `z`.
pub fn d_separated(dag: &Dag, x: usize, y: usize, z: &[usize]) -> Result<bool> {
    dag.check(x)?;
    dag.check(y)?;
    for &w in z {
        dag.check(w)?;
    }
    if x == y {
        return Err(Error::InvalidArgument(format!("d-separation query with x == y == {x}")));
    }
    if z.contains(&x) || z.contains(&y) {
        return Err(Error::InvalidArgument("conditioning set contains an endpoint".into()));
    }
    Ok(!d_connected(dag, x, y, z))
}

pub(crate) fn d_connected(dag: &Dag, x: usize, y: usize, z: &[usize]) -> bool {
    let n = dag.num_nodes();
    let mut in_z = vec![false; n];
    for &w in z {
        in_z[w] = true;
    }
    // Nodes that are in z or have a descendant in z.
    let mut opens_collider = vec![false; n];
    let mut stack: Vec<usize> = z.to_vec();
    while let Some(v) = stack.pop() {
        if opens_collider[v] {
            continue;
        }
        opens_collider[v] = true;
        stack.extend(dag.parents(v));
    }

    // visited[v][0]: reached from a child (moving up); [1]: from a parent.
    let mut visited = vec![[false; 2]; n];
    let mut frontier: Vec<(usize, bool)> = vec![(x, true)];
    while let Some((v, upward)) = frontier.pop() {
        let slot = usize::from(!upward);
        if visited[v][slot] {
            continue;
        }
        visited[v][slot] = true;
        if v == y {
            return true;
        }
        if upward {
            if !in_z[v] {
                frontier.extend(dag.parents(v).into_iter().map(|p| (p, true)));
                frontier.extend(dag.children(v).into_iter().map(|c| (c, false)));
            }
        } else {
            if !in_z[v] {
                frontier.extend(dag.children(v).into_iter().map(|c| (c, false)));
            }
            if opens_collider[v] {
                frontier.extend(dag.parents(v).into_iter().map(|p| (p, true)));
            }
        }
    }
    false
}
