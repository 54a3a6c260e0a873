//! Edge-list and group-table files, and a Cayley graph built from one.

use deloc::graph::{cayley_graph, parse_edge_list, parse_group_table, write_edge_list, write_group_table, GroupTable};

pub fn run() -> deloc::Result<()> {
    let g = parse_edge_list("# vertices 5\n0 1\n1 2\n2 0\n3 4 0.5\n")?;
    let mut out = Vec::new();
    write_edge_list(&g, &mut out)?;
    print!("{}", String::from_utf8_lossy(&out));

    // Z/6 with a weight that puts 1 on +-1 and 0.25 on 3
    let z6 = GroupTable::cyclic(6)?.with_weights(vec![0.0, 1.0, 0.0, 0.25, 0.0, 1.0])?;
    let mut csv = Vec::new();
    write_group_table(&z6, &mut csv)?;
    let back = parse_group_table(&String::from_utf8_lossy(&csv))?;
    let cay = cayley_graph(&back)?;
    println!("Cayley graph of Z/6: {} vertices, {} edges, weighted: {}", cay.vertex_count(), cay.edge_count(), cay.is_weighted());
    Ok(())
}

#[allow(dead_code)]
fn main() -> deloc::Result<()> {
    run()
}
