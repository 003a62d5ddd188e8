fn main() {
    std::process::exit(floorplan3d::cli::run(std::env::args_os()));
}
