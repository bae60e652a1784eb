//! Turns a per-image attribute table into a dataset, grouping attributes
//! into one entity per body part.
//!
//! cargo run --example convert_attributes

use semproto::convert::{convert_attribute_matrix_str, Grouping, DEFAULT_THRESHOLD};

const MATRIX: &str = "\
image\tattribute\tpresent\tlabel
img1\thas_bill_shape::dagger\t1\tTern
img1\thas_wing_color::grey\t1\tTern
img1\thas_wing_color::white\t1\tTern
img1\thas_tail_shape::forked\t1\tTern
img2\thas_bill_shape::hooked\t1\tHawk
img2\thas_wing_color::brown\t1\tHawk
img2\thas_tail_shape::forked\t0\tHawk
";

fn main() -> semproto::Result<()> {
    for grouping in [Grouping::Whole, Grouping::PartPrefix] {
        let dataset = convert_attribute_matrix_str(MATRIX, None, grouping, DEFAULT_THRESHOLD)?;
        println!("grouping {grouping:?}:");
        print!("{}", dataset.to_jsonl());
    }
    Ok(())
}
