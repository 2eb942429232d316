//! Two-phase heuristic repair: drop items from the worst end of the ordering
//! until feasible, then greedily add every fitting item from the best end.
//!
//! Repair is deterministic; any randomness reaches it only through the item
//! ordering. The result is always feasible and maximal.

use crate::instance::{Instance, Solution};
use crate::ordering::EfficiencyOrdering;

/// DROP phase: scan positions from worst to best, removing selected items
/// until the solution is feasible. The feasibility check precedes each
/// removal, so only the worst-positioned surplus items go.
pub(crate) fn drop_phase(sol: &mut Solution, ordering: &EfficiencyOrdering, inst: &Instance) {
    for pos in (0..ordering.len()).rev() {
        if sol.is_feasible(inst) {
            return;
        }
        let item = ordering.item_at(pos);
        if sol.bit(item) {
            sol.set_bit(item, false, inst);
        }
    }
}

/// ADD phase: scan positions from best to worst, inserting every unselected
/// item that fits. Items removed by DROP may re-enter if slack allows.
pub(crate) fn add_phase(sol: &mut Solution, ordering: &EfficiencyOrdering, inst: &Instance) {
    for pos in 0..ordering.len() {
        let item = ordering.item_at(pos);
        if !sol.bit(item) && sol.fits(item, inst) {
            sol.set_bit(item, true, inst);
        }
    }
}

/// Repairs a solution in place; afterwards it is feasible and maximal (no
/// unselected item fits).
pub fn heuristic_repair(sol: &mut Solution, ordering: &EfficiencyOrdering, inst: &Instance) {
    drop_phase(sol, ordering, inst);
    add_phase(sol, ordering, inst);
}

/// Repairs every member of a population independently.
pub fn repair_population(
    pop: &mut [Solution],
    ordering: &EfficiencyOrdering,
    inst: &Instance,
) {
    for sol in pop.iter_mut() {
        heuristic_repair(sol, ordering, inst);
    }
}

/// True iff no unselected item fits, i.e. the solution cannot be extended.
pub fn is_maximal(sol: &Solution, inst: &Instance) -> bool {
    (0..inst.n()).all(|j| sol.bit(j) || !sol.fits(j, inst))
}
