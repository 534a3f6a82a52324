from pathlib import Path

from matplotlib import pyplot as plt

color_per_policy = {
    "mwss": '#e31a1c',  # red
    "mwss-fh": '#fb9a99',  # light coral
    "mwss-rand": '#33a02c',  # dark green
    "mwss-rand-online": '#b2df8a',  # light green
    "offline": "#fdbf6f",  # light orange
    "uncoded-rand": 'cornflowerblue',
}

marker_per_policy = {
    "mwss": "s",
    "mwss-fh": "s",
    "mwss-rand": "o",
    "mwss-rand-online": "o",
    "offline": "^",
    "uncoded-rand": "v",
}

linestyle_per_policy = {
    "uncoded-rand": "--",
}


def unify_layout(ax, fontsize=20, title=None, add_legend=True, capacity=None):
    """
    Common axis styling. With `capacity` given, a dotted vertical line marks that load multiplier (the boundary of
    the rate region when the pattern's rates lie on it).
    """
    if capacity is not None:
        ax.axvline(capacity, color='grey', linestyle=':', linewidth=1)
    if add_legend:
        ax.legend(fontsize=fontsize)
    for axis in (ax.xaxis, ax.yaxis):
        axis.get_label().set_fontsize(fontsize)
    ax.tick_params(axis='both', labelsize=fontsize)
    if title is not None:
        ax.set_title(title, fontsize=fontsize)
    ax.grid(visible=True, which='both', axis='both', alpha=0.5)


def export_legend(ax, filename: Path) -> Path:
    """ Saves the legend of `ax` alone, one column per two policies. """
    handles, labels = ax.get_legend_handles_labels()
    legend_fig = plt.figure()
    legend = legend_fig.legend(handles, labels, frameon=False, loc='center', ncol=max(1, (len(labels) + 1) // 2),
                               fontsize='large')
    legend_fig.canvas.draw()
    bbox = legend.get_window_extent().transformed(legend_fig.dpi_scale_trans.inverted())
    legend_fig.savefig(filename, dpi='figure', bbox_inches=bbox)
    plt.close(legend_fig)
    return filename
