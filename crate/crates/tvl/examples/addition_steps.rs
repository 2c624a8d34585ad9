// Five addition steps on the Z101 table, each swallowing one fresh pair
// of vertices while the rainbow colour set stays put.

use tvl::absorption::{addition_step, AdditionState};
use tvl::constructions::cyclic_graph;
use tvl::graph::Vertex;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ledger {
    pub step: usize,
    pub m_id: usize,
    pub m_rb: usize,
    pub vertices: usize,
    pub colours_unchanged: bool,
}

pub fn run_example() -> tvl::Result<Vec<Ledger>> {
    let g = cyclic_graph(101);
    let mut state = AdditionState::demo(&g, 0, 20, 60, 4)?;
    let colours = state.colours();
    let mut out = vec![Ledger {
        step: 0,
        m_id: state.m_id.len(),
        m_rb: state.m_rb.len(),
        vertices: state.vertex_set().len(),
        colours_unchanged: true,
    }];
    for step in 1..=5 {
        let vs = state.vertex_set();
        let x = (0..101)
            .find(|&a| !vs.contains(&Vertex::A(a)))
            .expect("fresh A vertex");
        let y = (0..101)
            .find(|&b| !vs.contains(&Vertex::B(b)))
            .expect("fresh B vertex");
        state = addition_step(&g, &state, x, y)?.state;
        state.check(&g)?;
        out.push(Ledger {
            step,
            m_id: state.m_id.len(),
            m_rb: state.m_rb.len(),
            vertices: state.vertex_set().len(),
            colours_unchanged: state.colours() == colours,
        });
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> tvl::Result<()> {
    for l in run_example()? {
        println!(
            "step {}: |M_id| {} |M_rb| {} vertices {} colours unchanged {}",
            l.step, l.m_id, l.m_rb, l.vertices, l.colours_unchanged
        );
    }
    Ok(())
}
