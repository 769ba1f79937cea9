use mc_mosaic::alloc_stats::CountingAllocator;

#[global_allocator]
static ALLOC: CountingAllocator = CountingAllocator;

fn main() {
    std::process::exit(mc_mosaic::cli::run(std::env::args_os()));
}
