//! Prints the labyrinth in the plain-text map format.

fn main() {
    print!("{}", tpg_nav::env::LabyrinthMap::my_way_home().to_text());
}
