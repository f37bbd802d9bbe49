fn main() {
    std::process::exit(tdlg::cli::main_with_args(std::env::args_os()));
}
