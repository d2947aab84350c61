//! Renders the same attractor with the chaos game and with Hutchinson
//! iteration and writes both as PGM images into the temp directory.

use std::fs::File;
use std::io::BufWriter;

use bifract::ifs::{build_maps, chaos_game, chord_bitmap, graph_frame, hutchinson_iterate, Bitmap};
use bifract::io::write_pgm;
use bifract::InterpolationProblem;

fn main() -> bifract::Result<()> {
    let problem = InterpolationProblem::uniform(vec![0.0, 0.8, 0.3, 0.0], vec![0.5, 0.6, 0.4, 0.5])?;
    let maps = build_maps(&problem)?;
    let frame = graph_frame(&problem, 800, 600)?;

    let points = chaos_game(&maps.maps, (0.0, 0.0), 500_000, 100, 7);
    let (chaos, dropped) = Bitmap::from_points(frame, &points);
    let det = hutchinson_iterate(&maps.maps, &chord_bitmap(&problem, frame), 12)?;

    let dir = std::env::temp_dir();
    for (name, bitmap) in [("chaos.pgm", &chaos), ("hutchinson.pgm", &det)] {
        let path = dir.join(name);
        write_pgm(bitmap, BufWriter::new(File::create(&path)?))?;
        println!("{} pixels -> {}", bitmap.count(), path.display());
    }
    println!("dropped {dropped} points; agree within one pixel: {}", chaos.agrees_within_one_pixel(&det));
    Ok(())
}
