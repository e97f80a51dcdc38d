//! Prints the inclination polynomials of the third-order secular term and
//! of the second-order long-period generators.

fn main() {
    print!("{}", j2lab::hamiltonians::render_tables());
    println!("checksum {}", j2lab::hamiltonians::tables::checksum());
}
