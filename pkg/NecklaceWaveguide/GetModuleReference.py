from sys import modules
from inspect import getmembers, isfunction
from types import ModuleType
from typing import Dict, Callable, Iterable, Union


def list_target(module_name: Union[str, ModuleType], target, blacklist: Iterable, local_only) -> Dict[str, Callable]:

    blacklist = set() if blacklist is None else set(blacklist)

    try:
        target_module = modules[module_name]
    except (KeyError, TypeError):
        if isinstance(module_name, ModuleType):
            target_module = module_name
        else:
            raise

    members = getmembers(target_module, target)

    if local_only:
        members = [(name, ref) for name, ref in members if modules[ref.__module__] is target_module]

    return {name: ref for name, ref in members if name not in blacklist and not name[0] == "_"}


def list_function(name, blacklist: Iterable = None, local_only=True) -> Dict[str, Callable]:
    return list_target(name, isfunction, blacklist, local_only)


def list_commands(name, prefix="cmd_") -> Dict[str, Callable]:
    """
    Collects subcommand handlers by name prefix. `cmd_bands` is registered as `bands`.

    :param name: module name or module object holding handlers
    :param prefix: function name prefix marking a handler

    :return: Dict mapping subcommand name to handler
    """

    return {
        fn_name[len(prefix):]: ref for fn_name, ref in list_function(name).items() if fn_name.startswith(prefix)
    }
