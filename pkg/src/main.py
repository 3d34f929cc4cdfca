import os
import sys
import argparse
import asyncio, functools, logging, time
from concurrent.futures import ThreadPoolExecutor

from config import (
    DEFAULT_FIT_TOL, DEFAULT_RADIUS, DEFAULT_SEED, LOG_DIR, LOG_FILE, MODES, OUT_DIR,
    RunConfig, make_time_grid, parse_ells, parse_t_grid, thread_count,
)
from errors import EBMError, UsageError, as_ebm_error
from evaluate import run_suites, write_report
from relaxation import compute_spectrum
from stages import cluster_stage, invert_stage, mode_stage, read_model_stage, spectrum_stage
from tools import write_cluster, write_inversion, write_kernel_table, write_mode_table

EXIT_OK, EXIT_PROPERTY, EXIT_FIT = 0, 1, 3

# Queues between pipeline stages, initialized in main_async
mode_queue = cluster_queue = write_queue = None

# Worker pool for blocking numerics, sized from EBM_THREADS
executor = None

pipeline_log = logging.getLogger("pipeline")


# Helper : run blocking CPU-bound code in a thread
async def run_blocking(fn, *args, **kw):
    loop = asyncio.get_running_loop()
    part = functools.partial(fn, *args, **kw)
    return await loop.run_in_executor(executor, part)

#Helper: Log events to logs/pipeline_log.txt, serialized by log_lock (created per event loop)
log_lock = None
async def log_event(tag, item, stage):
    async with log_lock:
        pipeline_log.info("[%s] %s at stage: %s", tag, item, stage)


def configure_logging(log_dir: str = LOG_DIR):
    os.makedirs(log_dir, exist_ok=True)
    handler = logging.FileHandler(os.path.join(log_dir, LOG_FILE), mode="w", encoding="utf-8")
    handler.setFormatter(logging.Formatter("[%(asctime)s] %(message)s", datefmt="%H:%M:%S"))
    root = logging.getLogger()
    for h in list(root.handlers):
        if isinstance(h, logging.FileHandler):
            root.removeHandler(h)
            h.close()
    root.addHandler(handler)
    root.setLevel(logging.INFO)


def _unwrap(result: dict, key: str):
    if "error" in result:
        raise result["error"]
    return result[key]


# --- forward pipeline ---

async def mode_worker(model, failures, crashed):
    '''Solves the radial mode of each requested index'''
    while True:
        ell = await mode_queue.get()
        try:
            await log_event("MODE", f"ell={ell}", "start")
            out = await run_blocking(mode_stage.run, model, ell)
            if "error" in out:
                failures.append((ell, out["error"]))
            else:
                await cluster_queue.put((ell, out["mode"]))
            await log_event("MODE", f"ell={ell}", "done")
        except Exception as e:
            crashed.append(e)
        finally:
            mode_queue.task_done()

async def cluster_worker(pair, modes, failures, crashed):
    '''Roots of the cluster polynomial for each solved mode'''
    while True:
        ell, mode = await cluster_queue.get()
        try:
            await log_event("CLUSTER", f"ell={ell}", "start")
            out = await run_blocking(cluster_stage.run, pair, mode)
            if "error" in out:
                failures.append((ell, out["error"]))
            else:
                modes[ell] = mode
                await write_queue.put((f"cluster_ell{ell}.json", write_cluster, (out["cluster"],)))
            await log_event("CLUSTER", f"ell={ell}", "done")
        except Exception as e:
            crashed.append(e)
        finally:
            cluster_queue.task_done()

async def write_worker(out_dir, crashed):
    '''Single writer, so each output file is written by one task only'''
    while True:
        name, writer, payload = await write_queue.get()
        try:
            await log_event("WRITE", name, "start")
            writer(*payload, os.path.join(out_dir, name))
            await log_event("WRITE", name, "done")
        except Exception as e:
            crashed.append(e)
        finally:
            write_queue.task_done()


async def main_async(config: RunConfig) -> dict:
    global mode_queue, cluster_queue, write_queue, executor, log_lock
    log_lock = asyncio.Lock()
    mode_queue = asyncio.Queue()
    cluster_queue = asyncio.Queue()
    write_queue = asyncio.Queue()
    executor = ThreadPoolExecutor(max_workers=config.threads)
    os.makedirs(config.out_dir, exist_ok=True)

    try:
        await log_event("READ", config.model_path, "start")
        model = _unwrap(read_model_stage.run(config.model_path), "model")
        spectrum, pair = _unwrap(await run_blocking(spectrum_stage.run, model), "spectrum")
        await log_event("READ", config.model_path, "done")

        for ell in config.ells:
            await mode_queue.put(ell)

        failures, crashed, modes = [], [], {}
        workers = [
            *[asyncio.create_task(mode_worker(model, failures, crashed)) for _ in range(config.threads)],
            *[asyncio.create_task(cluster_worker(pair, modes, failures, crashed)) for _ in range(config.threads)],
            asyncio.create_task(write_worker(config.out_dir, crashed)),
        ]
        await write_queue.put(("kernel.csv", write_kernel_table, (spectrum, make_time_grid(config.t_grid))))

        # Wait for all queues to finish
        await mode_queue.join()
        await cluster_queue.join()
        await write_queue.join()

        # Finish
        for w in workers:
            w.cancel()
    finally:
        executor.shutdown(wait=True)

    if crashed:
        raise as_ebm_error(crashed[0])
    if failures:
        raise sorted(failures, key=lambda f: f[0])[0][1]
    write_mode_table([modes[ell] for ell in sorted(modes)], config.out_path("modes.csv"))
    return {"model": model, "pair": pair, "modes": modes}


def run_forward(config: RunConfig) -> int:
    asyncio.run(main_async(config))
    return EXIT_OK


def run_kernel(config: RunConfig) -> int:
    pipeline_log.info("[KERNEL] %s at stage: start", config.model_path)
    model = _unwrap(read_model_stage.run(config.model_path), "model")
    write_kernel_table(compute_spectrum(model), make_time_grid(config.t_grid), config.out_path("kernel.csv"))
    pipeline_log.info("[KERNEL] %s at stage: done", config.model_path)
    return EXIT_OK


def run_invert(config: RunConfig) -> int:
    path1, path2 = config.cluster_paths
    pipeline_log.info("[INVERT] %s + %s at stage: start", path1, path2)
    result = _unwrap(invert_stage.run(path1, path2, config.mode, config.radius), "result")
    write_inversion(result, config.out_path("inversion.json"))
    pipeline_log.info("[INVERT] fit residual %.3e at stage: done", result.fit_residual)
    return EXIT_OK if result.fit_residual < config.tol else EXIT_FIT


def run_verify(config: RunConfig) -> int:
    global executor
    pipeline_log.info("[VERIFY] seed %d at stage: start", config.seed)
    executor = ThreadPoolExecutor(max_workers=config.threads)
    try:
        results = asyncio.run(run_suites(config.seed, config.cases, config.only, run_blocking))
    finally:
        executor.shutdown(wait=True)
    write_report(results, config.out_path("verify_report.txt"), config.seed)
    pipeline_log.info("[VERIFY] %d/%d properties passed at stage: done",
                      sum(r.passed for r in results), len(results))
    for r in results:
        print(r.summary())
    return EXIT_OK if all(r.passed for r in results) else EXIT_PROPERTY


# --- command line ---

class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="ebm", description="Relaxation kernels, cluster eigenvalues and inversion of an extended Burgers ball.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    fwd = sub.add_parser("forward", help="clusters for each --ell plus the kernel table")
    fwd.add_argument("--model", required=True)
    fwd.add_argument("--ell", default="1,2")
    fwd.add_argument("--t-grid", default="0:10:0.1")

    ker = sub.add_parser("kernel", help="kernel table only")
    ker.add_argument("--model", required=True)
    ker.add_argument("--t-grid", default="0:10:0.1")

    inv = sub.add_parser("invert", help="recover the model from two cluster files")
    inv.add_argument("clusters", nargs=2)
    inv.add_argument("--mode", default="known-c", choices=MODES)
    inv.add_argument("--radius", type=float, default=DEFAULT_RADIUS)
    inv.add_argument("--tol", type=float, default=DEFAULT_FIT_TOL)

    ver = sub.add_parser("verify", help="run the property suites")
    ver.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ver.add_argument("--cases", type=int, default=None)
    ver.add_argument("--only", default="")

    for p in (fwd, ker, inv, ver):
        p.add_argument("--out", default=OUT_DIR)
    return parser


def config_from_args(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    kw = {"command": args.command, "out_dir": args.out, "threads": thread_count()}
    if args.command in ("forward", "kernel"):
        kw["model_path"] = args.model
        kw["t_grid"] = parse_t_grid(args.t_grid)
    if args.command == "forward":
        kw["ells"] = parse_ells(args.ell)
    if args.command == "invert":
        kw.update(cluster_paths=tuple(args.clusters), mode=args.mode, radius=args.radius, tol=args.tol)
    if args.command == "verify":
        kw.update(seed=args.seed, cases=args.cases,
                  only=tuple(s.strip() for s in args.only.split(",") if s.strip()))
    return RunConfig(**kw)


COMMANDS = {"forward": run_forward, "kernel": run_kernel, "invert": run_invert, "verify": run_verify}


def main(argv=None) -> int:
    try:
        config = config_from_args(sys.argv[1:] if argv is None else argv)
        configure_logging()
        started = time.time()
        code = COMMANDS[config.command](config)
        pipeline_log.info("[%s] exit %d after %.2fs", config.command.upper(), code, time.time() - started)
        return code
    except (EBMError, OSError) as e:
        err = as_ebm_error(e)
        print(err.to_json(), file=sys.stderr)
        return err.exit_code


if __name__ == "__main__":
    sys.exit(main())
