use crate::chain::{EssentialLabel, Link, Site};
use crate::name::Chan;
use crate::process::{Definition, Definitions, Process};

fn label(source: Site, target: Site) -> EssentialLabel {
    EssentialLabel::single(Link::new(source, target).expect("solid link"))
}

fn chan(name: String) -> Chan {
    Chan::from_static(&name)
}

/// An `n × m` switch whose links are added and removed at run time.
///
/// For every pair `(i, j)`, `Rhat_i_j` is the absent link waiting for
/// `add_i_j`, and `R_i_j` is the present link that forwards `a_i` to
/// `b_j`, can be removed on `rem_i_j`, or duplicated on `add_i_j`. The
/// returned process starts with every link absent.
pub fn build_dynamic_infra(n: usize, m: usize) -> (Process, Definitions) {
    assert!(n >= 1 && m >= 1, "dynamic infrastructure needs at least one port per side");
    let mut defs = Definitions::new();
    let mut absent = Vec::new();
    for i in 1..=n {
        for j in 1..=m {
            let a = chan(format!("a{i}"));
            let b = chan(format!("b{j}"));
            let add = chan(format!("add_{i}_{j}"));
            let rem = chan(format!("rem_{i}_{j}"));
            let params = vec![a.clone(), b.clone(), add.clone(), rem.clone()];
            let present = Process::Call(format!("R_{i}_{j}"), params.clone());
            let waiting = Process::Call(format!("Rhat_{i}_{j}"), params.clone());
            defs.insert(
                format!("Rhat_{i}_{j}"),
                Definition {
                    params: params.clone(),
                    body: Process::prefix(label(Site::Chan(add.clone()), Site::Tau), present.clone()),
                    implicit: false,
                },
            );
            let body = Process::sum_of([
                Process::prefix(label(Site::Chan(a), Site::Chan(b)), present.clone()),
                Process::prefix(label(Site::Chan(rem), Site::Tau), waiting.clone()),
                Process::prefix(label(Site::Chan(add), Site::Tau), Process::par(present.clone(), present)),
            ]);
            defs.insert(format!("R_{i}_{j}"), Definition { params, body, implicit: false });
            absent.push(waiting);
        }
    }
    (Process::par_of(absent), defs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::EssentialLabel;
    use crate::semantics::{sorted_steps, Bounds};

    fn essentials(p: &Process, defs: &Definitions) -> Vec<(EssentialLabel, Process)> {
        sorted_steps(p, defs, &Bounds::default())
            .unwrap()
            .into_iter()
            .map(|(l, t, _)| (l.reduce(), t))
            .collect()
    }

    fn fire(p: &Process, defs: &Definitions, essential: &str) -> Process {
        let want: EssentialLabel = essential.parse().unwrap();
        essentials(p, defs)
            .into_iter()
            .find(|(e, _)| *e == want)
            .map(|(_, t)| t)
            .unwrap_or_else(|| panic!("no {essential} from {p}"))
    }

    fn offers(p: &Process, defs: &Definitions, essential: &str) -> bool {
        let want: EssentialLabel = essential.parse().unwrap();
        essentials(p, defs).iter().any(|(e, _)| *e == want)
    }

    #[test]
    fn add_then_remove_a_link() {
        let (p, defs) = build_dynamic_infra(1, 1);
        assert!(!offers(&p, &defs, "a1\\b1"));
        let added = fire(&p, &defs, "add_1_1\\tau");
        assert!(offers(&added, &defs, "a1\\b1"));
        let removed = fire(&added, &defs, "rem_1_1\\tau");
        assert!(!offers(&removed, &defs, "a1\\b1"));
    }

    #[test]
    fn links_are_counted_with_multiplicity() {
        let (p, defs) = build_dynamic_infra(1, 1);
        let once = fire(&p, &defs, "add_1_1\\tau");
        let twice = fire(&once, &defs, "add_1_1\\tau");
        let removed = fire(&twice, &defs, "rem_1_1\\tau");
        assert!(offers(&removed, &defs, "a1\\b1"));
    }

    #[test]
    fn initially_one_add_per_pair() {
        let (p, defs) = build_dynamic_infra(2, 3);
        let adds = essentials(&p, &defs)
            .iter()
            .filter(|(e, _)| e.to_string().starts_with("add_"))
            .count();
        assert_eq!(adds, 6);
    }
}
