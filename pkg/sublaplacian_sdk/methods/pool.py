from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

from sublaplacian_sdk import config

Item = TypeVar("Item")
Result = TypeVar("Result")


def pool_map(function: Callable[[Item], Result], items: Iterable[Item]) -> List[Result]:
    """
    Maps `function` over `items` on a thread pool.

    Items are sent to workers in bunches of config.POOL_MAX_BUNCH. Results keep input order.
    """
    items = list(items)
    if not items:
        return []

    bunch = max(1, config.POOL_MAX_BUNCH)
    bunches = [items[i : i + bunch] for i in range(0, len(items), bunch)]

    def execute(bunch_items):
        return [function(item) for item in bunch_items]

    if len(bunches) == 1 or config.MAX_WORKERS <= 1:
        thread_results = map(execute, bunches)
        return [result for results in thread_results for result in results]

    with ThreadPoolExecutor(max_workers=config.MAX_WORKERS) as executor:
        thread_results = executor.map(
            execute,
            bunches,
            timeout=config.POOL_EXECUTOR_TIMEOUT,
        )

        result = []
        for thread_result in thread_results:
            result.extend(thread_result)

    return result
